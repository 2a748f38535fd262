#include "browseragent/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace browseragent::html {

namespace {

constexpr std::array<std::string_view, 14> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img",
    "input", "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array<std::string_view, 4> kRawTextElements = {"script", "style", "title",
                                                              "textarea"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N> &set, std::string_view tag) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '-' || c == '_' || c == ':' || c == '.';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void append_utf8(std::string &out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

struct NamedEntity {
  std::string_view name;
  std::uint32_t code_point;
};

constexpr std::array<NamedEntity, 20> kNamedEntities = {{
    {"amp", '&'},       {"lt", '<'},        {"gt", '>'},        {"quot", '"'},
    {"apos", '\''},     {"nbsp", ' '},      {"ndash", 0x2013},  {"mdash", 0x2014},
    {"hellip", 0x2026}, {"copy", 0xA9},     {"reg", 0xAE},      {"laquo", 0xAB},
    {"raquo", 0xBB},    {"lsquo", 0x2018},  {"rsquo", 0x2019},  {"ldquo", 0x201C},
    {"rdquo", 0x201D},  {"middot", 0xB7},   {"times", 0xD7},    {"eacute", 0xE9},
}};

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {
    doc_.nodes.push_back(Node{NodeKind::Document, {}, {}, {}, {}});
    stack_.push_back(0);
  }

  Document run() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<' && try_markup()) continue;
      read_text();
    }
    return std::move(doc_);
  }

private:
  std::size_t add(Node node) {
    const auto index = doc_.nodes.size();
    doc_.nodes.push_back(std::move(node));
    doc_.nodes[stack_.back()].children.push_back(index);
    return index;
  }

  void add_text(std::string_view raw) {
    if (raw.empty()) return;
    Node node;
    node.kind = NodeKind::Text;
    node.text = decode_entities(raw);
    add(std::move(node));
  }

  void read_text() {
    const auto start = pos_;
    ++pos_; // a '<' that did not start markup is literal text
    while (pos_ < src_.size() && src_[pos_] != '<') ++pos_;
    add_text(src_.substr(start, pos_ - start));
  }

  bool try_markup() {
    const auto rest = src_.substr(pos_);
    if (rest.starts_with("<!--")) {
      auto end = src_.find("-->", pos_ + 4);
      Node node;
      node.kind = NodeKind::Comment;
      if (end == std::string_view::npos) end = src_.size();
      node.text = std::string(src_.substr(pos_ + 4, end - pos_ - 4));
      add(std::move(node));
      pos_ = std::min(src_.size(), end + 3);
      return true;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      const auto end = src_.find('>', pos_);
      pos_ = end == std::string_view::npos ? src_.size() : end + 1;
      return true;
    }
    if (rest.size() >= 2 && rest[1] == '/') return end_tag();
    if (rest.size() >= 2 && std::isalpha(static_cast<unsigned char>(rest[1])) != 0) {
      return start_tag();
    }
    return false;
  }

  bool end_tag() {
    std::size_t p = pos_ + 2;
    const auto name_start = p;
    while (p < src_.size() && is_name_char(src_[p])) ++p;
    const auto name = lower(src_.substr(name_start, p - name_start));
    const auto close = src_.find('>', p);
    pos_ = close == std::string_view::npos ? src_.size() : close + 1;
    if (name.empty()) return true;
    pop_to(name);
    return true;
  }

  void pop_to(std::string_view name) {
    for (auto i = stack_.size(); i-- > 1;) {
      if (doc_.nodes[stack_[i]].tag == name) {
        stack_.resize(i);
        return;
      }
    }
  }

  // Closes an open <li>/<p> when a new one starts inside the same list or
  // paragraph context.
  void implicit_close(std::string_view tag) {
    if (tag == "p") {
      if (doc_.nodes[stack_.back()].tag == "p") stack_.pop_back();
      return;
    }
    if (tag == "li") {
      for (auto i = stack_.size(); i-- > 1;) {
        const auto &t = doc_.nodes[stack_[i]].tag;
        if (t == "ul" || t == "ol") return;
        if (t == "li") {
          stack_.resize(i);
          return;
        }
      }
    }
  }

  bool start_tag() {
    std::size_t p = pos_ + 1;
    const auto name_start = p;
    while (p < src_.size() && is_name_char(src_[p])) ++p;
    Node node;
    node.kind = NodeKind::Element;
    node.tag = lower(src_.substr(name_start, p - name_start));
    bool self_closing = false;
    while (p < src_.size()) {
      while (p < src_.size() && is_space(src_[p])) ++p;
      if (p >= src_.size()) break;
      if (src_[p] == '>') {
        ++p;
        break;
      }
      if (src_[p] == '/') {
        ++p;
        if (p < src_.size() && src_[p] == '>') {
          self_closing = true;
          ++p;
          break;
        }
        continue;
      }
      const auto attr_start = p;
      while (p < src_.size() && !is_space(src_[p]) && src_[p] != '=' && src_[p] != '>' &&
             !(src_[p] == '/' && p + 1 < src_.size() && src_[p + 1] == '>')) {
        ++p;
      }
      auto attr_name = lower(src_.substr(attr_start, p - attr_start));
      std::string value;
      while (p < src_.size() && is_space(src_[p])) ++p;
      if (p < src_.size() && src_[p] == '=') {
        ++p;
        while (p < src_.size() && is_space(src_[p])) ++p;
        if (p < src_.size() && (src_[p] == '"' || src_[p] == '\'')) {
          const char quote = src_[p++];
          const auto value_start = p;
          while (p < src_.size() && src_[p] != quote) ++p;
          value = decode_entities(src_.substr(value_start, p - value_start));
          if (p < src_.size()) ++p;
        } else {
          const auto value_start = p;
          while (p < src_.size() && !is_space(src_[p]) && src_[p] != '>') ++p;
          value = decode_entities(src_.substr(value_start, p - value_start));
        }
      }
      if (attr_name.empty()) {
        if (p < src_.size() && attr_start == p) ++p; // stray character
        continue;
      }
      node.attrs.emplace_back(std::move(attr_name), std::move(value));
    }
    pos_ = p;

    implicit_close(node.tag);
    const auto tag = node.tag;
    const auto index = add(std::move(node));
    if (self_closing || contains(kVoidElements, tag)) return true;
    if (contains(kRawTextElements, tag)) {
      const auto closing = "</" + tag;
      auto end = pos_;
      while (true) {
        end = src_.find("</", end);
        if (end == std::string_view::npos) break;
        if (lower(src_.substr(end, closing.size())) == closing) break;
        end += 2;
      }
      if (end == std::string_view::npos) end = src_.size();
      stack_.push_back(index);
      if (tag == "script" || tag == "style") {
        Node raw;
        raw.kind = NodeKind::Text;
        raw.text = std::string(src_.substr(pos_, end - pos_));
        if (!raw.text.empty()) add(std::move(raw));
      } else {
        add_text(src_.substr(pos_, end - pos_));
      }
      stack_.pop_back();
      const auto gt = end == src_.size() ? end : src_.find('>', end);
      pos_ = gt == std::string_view::npos ? src_.size() : std::min(src_.size(), gt + 1);
      return true;
    }
    stack_.push_back(index);
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Document doc_;
  std::vector<std::size_t> stack_;
};

} // namespace

std::optional<std::string_view> Node::attr(std::string_view name) const {
  for (const auto &[key, value] : attrs) {
    if (key == name) return std::string_view(value);
  }
  return std::nullopt;
}

Document parse(std::string_view source) { return Parser(source).run(); }

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += text[i++];
      continue;
    }
    const auto ref = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (ref.size() > 1 && ref[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = ref[1] == 'x' || ref[1] == 'X';
      const auto digits = ref.substr(hex ? 2 : 1);
      auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size()) {
        append_utf8(out, cp);
        decoded = true;
      }
    } else {
      for (const auto &entity : kNamedEntities) {
        if (entity.name == ref) {
          append_utf8(out, entity.code_point);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&#39;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace browseragent::html
