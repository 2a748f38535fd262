#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace browseragent {

// Browser command language. Each command is rendered as
// `name [p1] [p2] ...` inside a triple-backtick fence.

struct Click {
  std::int64_t node_id = 1;
  std::string content;
  bool operator==(const Click &) const = default;
};

struct Hover {
  std::int64_t node_id = 1;
  std::string content;
  bool operator==(const Hover &) const = default;
};

struct Press {
  std::string key_comb;
  bool operator==(const Press &) const = default;
};

enum class ScrollDirection { Up, Down };

struct Scroll {
  ScrollDirection direction = ScrollDirection::Down;
  bool operator==(const Scroll &) const = default;
};

struct Type {
  std::int64_t node_id = 1;
  std::string content;
  bool press_enter = true;
  bool operator==(const Type &) const = default;
};

struct NewTab {
  bool operator==(const NewTab &) const = default;
};

struct TabFocus {
  std::int64_t tab_index = 0;
  bool operator==(const TabFocus &) const = default;
};

struct CloseTab {
  bool operator==(const CloseTab &) const = default;
};

struct Goto {
  std::string url;
  bool operator==(const Goto &) const = default;
};

struct GoBack {
  bool operator==(const GoBack &) const = default;
};

struct GoForward {
  bool operator==(const GoForward &) const = default;
};

struct Stop {
  std::string answer = "N/A";
  bool operator==(const Stop &) const = default;
};

using Action = std::variant<Click, Hover, Press, Scroll, Type, NewTab, TabFocus,
                            CloseTab, Goto, GoBack, GoForward, Stop>;

enum class ActionErrorKind { UnknownCommand, ArityError, BadParameter };

std::string_view to_string(ActionErrorKind kind);

class ActionParseError : public std::runtime_error {
public:
  ActionParseError(ActionErrorKind kind, const std::string &message);
  ActionErrorKind kind() const noexcept { return kind_; }

private:
  ActionErrorKind kind_;
};

/// Parses the interior of one code fence, e.g. `click [12] [Home]`.
/// Throws ActionParseError.
Action parse_action(std::string_view text);

/// Canonical `command [p1] [p2] ...` form. `type` always carries the
/// explicit press-enter group.
std::string render_action(const Action &action);

/// Command word for an action (`click`, `go_back`, ...).
std::string_view command_name(const Action &action);

bool is_stop(const Action &action);

/// One model completion split into its reasoning, conclusion and action.
struct ModelTurn {
  std::string raw;
  std::optional<std::string> think;
  std::optional<std::string> conclusion;
  std::optional<Action> action;
  /// Interior of the first fence, if one was found.
  std::optional<std::string> fence_body;
  /// Parse problems and ignored extra blocks; never fatal.
  std::vector<std::string> diagnostics;
};

/// Total: never throws on malformed text.
ModelTurn parse_model_output(std::string_view text);

} // namespace browseragent
