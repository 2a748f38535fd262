#pragma once

#include "browseragent/action.hpp"
#include "browseragent/ax_tree.hpp"
#include "browseragent/corpus.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace browseragent {

/// Observation returned once a stop action ends the session.
inline constexpr std::string_view kTerminalObservation = "[session terminated]";

struct EnvConfig {
  std::size_t viewport_height = kDefaultViewportHeight;
};

struct PageState {
  std::string url;
  AXTree tree;
  Viewport viewport;
  std::map<NodeId, std::string> form_state;
  NodeId id_base = 1;
};

struct Tab {
  std::vector<PageState> history;
  std::size_t cursor = 0;

  const PageState &current() const { return history[cursor]; }
  PageState &current() { return history[cursor]; }
};

struct StepOutcome {
  std::string observation;
  std::vector<std::string> diagnostics;
};

/// One episode's browser: tabs, per-tab history and viewport. Not
/// thread-safe; the owner steps it serially.
class Session {
public:
  Session(std::shared_ptr<const Corpus> corpus, std::string trace_id, EnvConfig config = {});

  /// Applies one action. Throws Error(NodeNotFound | SessionTerminated |
  /// NavigationError); state is unchanged when it throws.
  StepOutcome execute(const Action &action);

  /// Observation of the active tab (terminal marker once stopped).
  std::string observe() const;

  const std::string &trace_id() const { return trace_id_; }
  const std::vector<Tab> &tabs() const { return tabs_; }
  std::size_t active() const { return active_; }
  const PageState &current_page() const { return tabs_[active_].current(); }
  std::size_t step_count() const { return step_count_; }
  bool terminated() const { return terminated_; }
  const std::optional<std::string> &final_answer() const { return final_answer_; }
  /// Every diagnostic recorded so far, in order.
  const std::vector<std::string> &diagnostics() const { return diagnostics_; }

  /// Throws std::logic_error when a tab/history invariant is broken.
  void check_invariants() const;

private:
  PageState load(const std::string &target);
  void navigate(const std::string &target);
  Tab home_tab();
  void note(std::vector<std::string> &out, std::string message);

  std::shared_ptr<const Corpus> corpus_;
  std::string trace_id_;
  EnvConfig config_;
  std::vector<Tab> tabs_;
  std::size_t active_ = 0;
  std::size_t step_count_ = 0;
  NodeId next_id_base_ = 1;
  bool terminated_ = false;
  std::optional<std::string> final_answer_;
  std::vector<std::string> diagnostics_;
};

} // namespace browseragent
