#include "browseragent/browser_env.hpp"

#include "browseragent/errors.hpp"
#include "browseragent/url.hpp"

#include <stdexcept>

namespace browseragent {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

} // namespace

Session::Session(std::shared_ptr<const Corpus> corpus, std::string trace_id, EnvConfig config)
    : corpus_(std::move(corpus)), trace_id_(std::move(trace_id)), config_(config) {
  if (config_.viewport_height == 0) config_.viewport_height = kDefaultViewportHeight;
  tabs_.push_back(home_tab());
}

void Session::note(std::vector<std::string> &out, std::string message) {
  diagnostics_.push_back(message);
  out.push_back(std::move(message));
}

PageState Session::load(const std::string &target) {
  std::string html_text;
  std::string final_url = target;
  if (corpus_->is_search_url(target)) {
    const auto query = url::query_param(target, "pattern");
    const auto start_text = url::query_param(target, "start");
    std::size_t start = 0;
    try {
      start = start_text.empty() ? 0 : std::stoul(start_text);
    } catch (const std::exception &) {
      throw Error(ErrorCode::NavigationError, "bad start offset in " + target);
    }
    html_text = search(*corpus_, query, start / kResultsPerPage);
  } else if (corpus_->is_random_url(target)) {
    const auto pick = fnv1a(trace_id_, next_id_base_) % corpus_->size();
    final_url = corpus_->url_at(pick);
    html_text = *corpus_->page(final_url);
  } else if (const auto *page = corpus_->page(target)) {
    html_text = *page;
  } else {
    throw Error(ErrorCode::NavigationError, "cannot resolve " + target);
  }

  PageState state;
  state.url = final_url;
  state.id_base = next_id_base_;
  state.tree = merge_consecutive_text(build_ax_tree(html_text, next_id_base_, final_url));
  state.viewport.height_lines = config_.viewport_height;
  next_id_base_ += state.tree.id_span();
  return state;
}

Tab Session::home_tab() {
  Tab tab;
  tab.history.push_back(load(corpus_->home_url()));
  return tab;
}

void Session::navigate(const std::string &target) {
  auto state = load(target);
  auto &tab = tabs_[active_];
  tab.history.resize(tab.cursor + 1);
  tab.history.push_back(std::move(state));
  tab.cursor = tab.history.size() - 1;
}

std::string Session::observe() const {
  if (terminated_) return std::string(kTerminalObservation);
  const auto &page = current_page();
  return render_observation(page.tree, page.viewport);
}

StepOutcome Session::execute(const Action &action) {
  if (terminated_) {
    throw Error(ErrorCode::SessionTerminated, "session " + trace_id_ + " already stopped");
  }
  StepOutcome out;
  auto &page = tabs_[active_].current();
  auto require_node = [&](NodeId id) -> AXNode & {
    auto *node = page.tree.find_mutable(id);
    if (node == nullptr) {
      throw Error(ErrorCode::NodeNotFound, "no element with id " + std::to_string(id));
    }
    return *node;
  };

  std::visit(
      overloaded{
          [&](const Click &a) {
            auto &node = require_node(a.node_id);
            if (node.role == Role::link && node.url) {
              navigate(url::resolve(page.url, *node.url));
            } else if (node.role == Role::checkbox) {
              auto &checked = node.attrs["checked"];
              checked = checked == "true" ? "false" : "true";
            } else {
              note(out.diagnostics, "click on non-interactive element " +
                                        std::to_string(a.node_id) + " had no effect");
            }
          },
          [&](const Hover &a) {
            require_node(a.node_id);
            note(out.diagnostics, "hover over " + std::to_string(a.node_id) + " recorded");
          },
          [&](const Press &a) { note(out.diagnostics, "press [" + a.key_comb + "] recorded"); },
          [&](const Scroll &a) {
            const auto total = render_lines(page.tree).size();
            const bool moved = a.direction == ScrollDirection::Down
                                   ? scroll_down(page.viewport, total)
                                   : scroll_up(page.viewport);
            if (!moved) note(out.diagnostics, "scroll clamped at page boundary");
          },
          [&](const Type &a) {
            auto &node = require_node(a.node_id);
            if (node.role != Role::textbox) {
              note(out.diagnostics,
                   "element " + std::to_string(a.node_id) + " is not a text field");
              return;
            }
            if (a.press_enter && node.search_box) {
              if (blank(a.content)) {
                note(out.diagnostics, "BadParameter: search query is empty");
                return;
              }
              navigate(corpus_->search_url(a.content, 0));
              return;
            }
            page.form_state[a.node_id] = a.content;
          },
          [&](const NewTab &) {
            tabs_.push_back(home_tab());
            active_ = tabs_.size() - 1;
          },
          [&](const TabFocus &a) {
            if (static_cast<std::size_t>(a.tab_index) >= tabs_.size()) {
              note(out.diagnostics, "no tab with index " + std::to_string(a.tab_index));
              return;
            }
            active_ = static_cast<std::size_t>(a.tab_index);
          },
          [&](const CloseTab &) {
            tabs_.erase(tabs_.begin() + static_cast<std::ptrdiff_t>(active_));
            if (tabs_.empty()) tabs_.push_back(home_tab());
            if (active_ >= tabs_.size()) active_ = tabs_.size() - 1;
          },
          [&](const Goto &a) { navigate(url::resolve(page.url, a.url)); },
          [&](const GoBack &) {
            auto &tab = tabs_[active_];
            if (tab.cursor == 0) {
              note(out.diagnostics, "go_back: no previous page");
              return;
            }
            --tab.cursor;
          },
          [&](const GoForward &) {
            auto &tab = tabs_[active_];
            if (tab.cursor + 1 >= tab.history.size()) {
              note(out.diagnostics, "go_forward: no next page");
              return;
            }
            ++tab.cursor;
          },
          [&](const Stop &a) {
            terminated_ = true;
            final_answer_ = a.answer;
          },
      },
      action);

  ++step_count_;
  out.observation = observe();
  return out;
}

void Session::check_invariants() const {
  if (terminated_) {
    if (!final_answer_) throw std::logic_error("terminated session without final answer");
    return;
  }
  if (tabs_.empty()) throw std::logic_error("session has no tabs");
  if (active_ >= tabs_.size()) throw std::logic_error("active tab out of range");
  for (const auto &tab : tabs_) {
    if (tab.history.empty()) throw std::logic_error("tab with empty history");
    if (tab.cursor >= tab.history.size()) throw std::logic_error("history cursor out of range");
  }
}

} // namespace browseragent
