#include "browseragent/action.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace browseragent {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

[[noreturn]] void fail(ActionErrorKind kind, const std::string &message) {
  throw ActionParseError(kind, message);
}

// Splits `[a] [b] ...` into content spans. A group closes at the first `]`
// that is followed by optional whitespace and then `[` or the end of text.
std::vector<Span> split_groups(std::string_view rest) {
  std::vector<Span> groups;
  std::size_t pos = 0;
  const std::size_t n = rest.size();
  while (pos < n) {
    if (rest[pos] != '[') {
      fail(ActionErrorKind::BadParameter,
           "parameters must be enclosed in brackets");
    }
    const std::size_t start = pos + 1;
    std::size_t next = std::string_view::npos;
    std::size_t close = std::string_view::npos;
    for (std::size_t j = start; j < n; ++j) {
      if (rest[j] != ']') continue;
      std::size_t k = j + 1;
      while (k < n && is_space(rest[k])) ++k;
      if (k == n || rest[k] == '[') {
        close = j;
        next = k;
        break;
      }
    }
    if (close == std::string_view::npos) {
      fail(ActionErrorKind::BadParameter, "unterminated bracket group");
    }
    groups.push_back({start, close});
    pos = next;
  }
  return groups;
}

std::string_view slice(std::string_view s, Span span) {
  return s.substr(span.begin, span.end - span.begin);
}

std::int64_t parse_int(std::string_view raw, std::string_view what) {
  const auto text = trim(raw);
  std::int64_t value = 0;
  const auto *first = text.data();
  const auto *last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    fail(ActionErrorKind::BadParameter,
         std::string(what) + " must be an integer, got '" + std::string(raw) + "'");
  }
  return value;
}

std::int64_t parse_node_id(std::string_view raw) {
  const auto id = parse_int(raw, "node id");
  if (id < 1) fail(ActionErrorKind::BadParameter, "node id must be >= 1");
  return id;
}

void expect_arity(std::string_view cmd, std::size_t got, std::size_t want) {
  if (got != want) {
    fail(ActionErrorKind::ArityError,
         std::string(cmd) + " takes " + std::to_string(want) +
             " parameter group(s), got " + std::to_string(got));
  }
}

void expect_min_arity(std::string_view cmd, std::size_t got, std::size_t want) {
  if (got < want) {
    fail(ActionErrorKind::ArityError,
         std::string(cmd) + " takes " + std::to_string(want) +
             " parameter group(s), got " + std::to_string(got));
  }
}

// Free text spanning from group `from` through the last group.
std::string tail_text(std::string_view rest, const std::vector<Span> &groups,
                      std::size_t from) {
  return std::string(slice(rest, {groups[from].begin, groups.back().end}));
}

std::string nonblank(std::string value, std::string_view what) {
  if (trim(value).empty()) {
    fail(ActionErrorKind::BadParameter, std::string(what) + " must not be empty");
  }
  return value;
}

constexpr std::array<std::string_view, 12> kCommands = {
    "click", "hover",     "press",   "scroll",  "type",       "new_tab",
    "tab_focus", "close_tab", "goto", "go_back", "go_forward", "stop"};

bool is_command(std::string_view word) {
  return std::find(kCommands.begin(), kCommands.end(), word) != kCommands.end();
}

std::optional<std::string> extract_block(std::string_view text,
                                         std::string_view open,
                                         std::string_view close,
                                         std::vector<std::string> &diagnostics) {
  const auto start = text.find(open);
  if (start == std::string_view::npos) return std::nullopt;
  const auto body_start = start + open.size();
  const auto end = text.find(close, body_start);
  if (end == std::string_view::npos) {
    diagnostics.push_back("unterminated " + std::string(open) + " block");
    return std::nullopt;
  }
  std::size_t extra = 0;
  for (auto p = text.find(open, end + close.size()); p != std::string_view::npos;
       p = text.find(open, p + open.size())) {
    ++extra;
  }
  if (extra > 0) {
    diagnostics.push_back("ignored " + std::to_string(extra) + " extra " +
                          std::string(open) + " block(s)");
  }
  return std::string(trim(text.substr(body_start, end - body_start)));
}

} // namespace

std::string_view to_string(ActionErrorKind kind) {
  switch (kind) {
  case ActionErrorKind::UnknownCommand: return "UnknownCommand";
  case ActionErrorKind::ArityError: return "ArityError";
  case ActionErrorKind::BadParameter: return "BadParameter";
  }
  return "BadParameter";
}

ActionParseError::ActionParseError(ActionErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

Action parse_action(std::string_view text) {
  const auto body = trim(text);
  std::size_t word_end = 0;
  while (word_end < body.size() && !is_space(body[word_end]) && body[word_end] != '[') {
    ++word_end;
  }
  const auto cmd = body.substr(0, word_end);
  if (!is_command(cmd)) {
    fail(ActionErrorKind::UnknownCommand, "unknown command '" + std::string(cmd) + "'");
  }
  auto rest = trim(body.substr(word_end));
  const auto groups = split_groups(rest);
  const auto n = groups.size();

  if (cmd == "click" || cmd == "hover") {
    expect_min_arity(cmd, n, 2);
    const auto id = parse_node_id(slice(rest, groups[0]));
    auto content = tail_text(rest, groups, 1);
    if (cmd == "click") return Click{id, std::move(content)};
    return Hover{id, std::move(content)};
  }
  if (cmd == "press") {
    expect_min_arity(cmd, n, 1);
    return Press{nonblank(tail_text(rest, groups, 0), "key combination")};
  }
  if (cmd == "scroll") {
    expect_arity(cmd, n, 1);
    const auto dir = trim(slice(rest, groups[0]));
    if (dir == "down") return Scroll{ScrollDirection::Down};
    if (dir == "up") return Scroll{ScrollDirection::Up};
    fail(ActionErrorKind::BadParameter,
         "scroll direction must be up or down, got '" + std::string(dir) + "'");
  }
  if (cmd == "type") {
    expect_min_arity(cmd, n, 2);
    const auto id = parse_node_id(slice(rest, groups[0]));
    if (n == 2) return Type{id, std::string(slice(rest, groups[1])), true};
    const auto flag = trim(slice(rest, groups.back()));
    if (flag != "0" && flag != "1") {
      fail(ActionErrorKind::BadParameter,
           "press_enter_after must be 0 or 1, got '" + std::string(flag) + "'");
    }
    std::string content(slice(rest, {groups[1].begin, groups[n - 2].end}));
    return Type{id, std::move(content), flag == "1"};
  }
  if (cmd == "tab_focus") {
    expect_arity(cmd, n, 1);
    const auto index = parse_int(slice(rest, groups[0]), "tab index");
    if (index < 0) fail(ActionErrorKind::BadParameter, "tab index must be >= 0");
    return TabFocus{index};
  }
  if (cmd == "goto") {
    expect_min_arity(cmd, n, 1);
    return Goto{nonblank(tail_text(rest, groups, 0), "url")};
  }
  if (cmd == "stop") {
    expect_min_arity(cmd, n, 1);
    return Stop{nonblank(tail_text(rest, groups, 0), "answer")};
  }
  expect_arity(cmd, n, 0);
  if (cmd == "new_tab") return NewTab{};
  if (cmd == "close_tab") return CloseTab{};
  if (cmd == "go_back") return GoBack{};
  return GoForward{};
}

std::string_view command_name(const Action &action) {
  return kCommands[action.index()];
}

bool is_stop(const Action &action) {
  return std::holds_alternative<Stop>(action);
}

std::string render_action(const Action &action) {
  auto group = [](const auto &value) {
    if constexpr (std::is_same_v<std::decay_t<decltype(value)>, std::int64_t>) {
      return " [" + std::to_string(value) + "]";
    } else {
      return " [" + std::string(value) + "]";
    }
  };
  std::string out(command_name(action));
  std::visit(overloaded{
                 [&](const Click &a) { out += group(a.node_id) + group(a.content); },
                 [&](const Hover &a) { out += group(a.node_id) + group(a.content); },
                 [&](const Press &a) { out += group(a.key_comb); },
                 [&](const Scroll &a) {
                   out += a.direction == ScrollDirection::Down ? " [down]" : " [up]";
                 },
                 [&](const Type &a) {
                   out += group(a.node_id) + group(a.content) + (a.press_enter ? " [1]" : " [0]");
                 },
                 [&](const TabFocus &a) { out += group(a.tab_index); },
                 [&](const Goto &a) { out += group(a.url); },
                 [&](const Stop &a) { out += group(a.answer); },
                 [](const auto &) {},
             },
             action);
  return out;
}

ModelTurn parse_model_output(std::string_view text) {
  ModelTurn turn;
  turn.raw = std::string(text);
  turn.think = extract_block(text, "<think>", "</think>", turn.diagnostics);
  turn.conclusion = extract_block(text, "<conclusion>", "</conclusion>", turn.diagnostics);

  constexpr std::string_view kFence = "```";
  const auto open = text.find(kFence);
  if (open == std::string_view::npos) return turn;
  const auto body_start = open + kFence.size();
  const auto close = text.find(kFence, body_start);
  if (close == std::string_view::npos) {
    turn.diagnostics.push_back("unterminated code fence");
    return turn;
  }
  if (text.find(kFence, close + kFence.size()) != std::string_view::npos) {
    turn.diagnostics.push_back("ignored code fences after the first");
  }
  auto body = trim(text.substr(body_start, close - body_start));
  // Tolerate an info string such as ```text\nclick [1] [x]```.
  if (const auto nl = body.find('\n'); nl != std::string_view::npos) {
    const auto first_line = trim(body.substr(0, nl));
    const bool bare_word = !first_line.empty() &&
                           std::all_of(first_line.begin(), first_line.end(), [](char c) {
                             return std::isalnum(static_cast<unsigned char>(c)) != 0 ||
                                    c == '_' || c == '-';
                           });
    if (bare_word && !is_command(first_line)) body = trim(body.substr(nl + 1));
  }
  turn.fence_body = std::string(body);
  try {
    turn.action = parse_action(body);
  } catch (const ActionParseError &e) {
    turn.diagnostics.push_back(e.what());
  }
  return turn;
}

} // namespace browseragent
