#include "browseragent/action.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <set>

using namespace browseragent;

namespace {

ActionErrorKind parse_error_kind(std::string_view text) {
  try {
    parse_action(text);
  } catch (const ActionParseError &e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << text);
  return ActionErrorKind::UnknownCommand;
}

} // namespace

TEST_CASE("parse_action: case-study commands") {
  CHECK(parse_action("click [1459] [Princes in the Tower]") ==
        Action{Click{1459, "Princes in the Tower"}});
  CHECK(parse_action("scroll [down]") == Action{Scroll{ScrollDirection::Down}});
  CHECK(parse_action("scroll [up]") == Action{Scroll{ScrollDirection::Up}});
  CHECK(parse_action("type [21] [death row inmates in the US] [1]") ==
        Action{Type{21, "death row inmates in the US", true}});
  CHECK(parse_action("type [331] [Princes in the Tower] [1]") ==
        Action{Type{331, "Princes in the Tower", true}});
  CHECK(parse_action("stop [King Edward IV]") == Action{Stop{"King Edward IV"}});
}

TEST_CASE("parse_action: every command word") {
  CHECK(parse_action("hover [3] [menu]") == Action{Hover{3, "menu"}});
  CHECK(parse_action("press [Ctrl+v]") == Action{Press{"Ctrl+v"}});
  CHECK(parse_action("new_tab") == Action{NewTab{}});
  CHECK(parse_action("tab_focus [2]") == Action{TabFocus{2}});
  CHECK(parse_action("close_tab") == Action{CloseTab{}});
  CHECK(parse_action("goto [http://kiwix.local/A/Foo]") == Action{Goto{"http://kiwix.local/A/Foo"}});
  CHECK(parse_action("go_back") == Action{GoBack{}});
  CHECK(parse_action("go_forward") == Action{GoForward{}});
  CHECK(parse_action("stop [N/A]") == Action{Stop{"N/A"}});
}

TEST_CASE("parse_action: whitespace and defaults") {
  CHECK(parse_action("  click [7] [Home]\n") == Action{Click{7, "Home"}});
  CHECK(parse_action("type [4] [query]") == Action{Type{4, "query", true}});
  CHECK(parse_action("type [4] [query] [0]") == Action{Type{4, "query", false}});
}

TEST_CASE("parse_action: free text with brackets") {
  const auto answer = "Skin Yard was from the U.S. (Seattle, Washington). Ostava was from Bulgaria "
                      "(not the U.S.).";
  CHECK(parse_action(std::string("stop [") + answer + "]") == Action{Stop{answer}});
  CHECK(parse_action("click [9] [List [A] of things]") == Action{Click{9, "List [A] of things"}});
  CHECK(parse_action("stop [a] [b]") == Action{Stop{"a] [b"}});
}

TEST_CASE("parse_action: errors") {
  CHECK(parse_error_kind("jump [5]") == ActionErrorKind::UnknownCommand);
  CHECK(parse_error_kind("Click [5] [x]") == ActionErrorKind::UnknownCommand);
  CHECK(parse_error_kind("") == ActionErrorKind::UnknownCommand);
  CHECK(parse_error_kind("click [5]") == ActionErrorKind::ArityError);
  CHECK(parse_error_kind("new_tab [1]") == ActionErrorKind::ArityError);
  CHECK(parse_error_kind("scroll") == ActionErrorKind::ArityError);
  CHECK(parse_error_kind("click [abc] [x]") == ActionErrorKind::BadParameter);
  CHECK(parse_error_kind("click [0] [x]") == ActionErrorKind::BadParameter);
  CHECK(parse_error_kind("tab_focus [-1]") == ActionErrorKind::BadParameter);
  CHECK(parse_error_kind("scroll [left]") == ActionErrorKind::BadParameter);
  CHECK(parse_error_kind("type [3] [x] [yes]") == ActionErrorKind::BadParameter);
  CHECK(parse_error_kind("stop []") == ActionErrorKind::BadParameter);
}

TEST_CASE("render_action: canonical forms") {
  CHECK(render_action(Stop{"N/A"}) == "stop [N/A]");
  CHECK(render_action(Type{331, "x", false}) == "type [331] [x] [0]");
  CHECK(render_action(Type{331, "Princes in the Tower", true}) ==
        "type [331] [Princes in the Tower] [1]");
  CHECK(render_action(Click{7, "Home"}) == "click [7] [Home]");
  CHECK(render_action(Scroll{ScrollDirection::Up}) == "scroll [up]");
  CHECK(render_action(GoBack{}) == "go_back");
  CHECK(render_action(TabFocus{0}) == "tab_focus [0]");
}

TEST_CASE("round trip over randomized actions covers all surface forms") {
  testsupport::Rng rng(11);
  std::set<std::string> seen;
  for (int i = 0; i < 3000; ++i) {
    const auto a = testsupport::random_action(rng);
    seen.insert(testsupport::surface_form(a));
    const auto text = render_action(a);
    INFO(text);
    CHECK(parse_action(text) == a);
  }
  CHECK(seen.size() == 13);
}

TEST_CASE("parse_model_output: think, conclusion, fenced action") {
  const auto turn = parse_model_output(
      "<think>\nLook up the article.\n</think>\n<conclusion> The father of the Princes in the Tower "
      "was King Edward IV.</conclusion>\n```stop [King Edward IV]```");
  REQUIRE(turn.think);
  CHECK(*turn.think == "Look up the article.");
  REQUIRE(turn.conclusion);
  CHECK(*turn.conclusion == "The father of the Princes in the Tower was King Edward IV.");
  REQUIRE(turn.action);
  CHECK(*turn.action == Action{Stop{"King Edward IV"}});
}

TEST_CASE("parse_model_output: inline fence") {
  const auto turn = parse_model_output("<think>...</think>\n```type [331] [Princes in the Tower] [1]```");
  REQUIRE(turn.action);
  CHECK(*turn.action == Action{Type{331, "Princes in the Tower", true}});
  CHECK_FALSE(turn.conclusion);
}

TEST_CASE("parse_model_output: no markers") {
  const auto turn = parse_model_output("no tags at all");
  CHECK_FALSE(turn.think);
  CHECK_FALSE(turn.conclusion);
  CHECK_FALSE(turn.action);
  CHECK_FALSE(turn.fence_body);
}

TEST_CASE("parse_model_output: first fence wins and extras are noted") {
  const auto turn = parse_model_output("<think>a</think><think>b</think>\n```go_back```\n```go_forward```");
  REQUIRE(turn.think);
  CHECK(*turn.think == "a");
  REQUIRE(turn.action);
  CHECK(*turn.action == Action{GoBack{}});
  CHECK_FALSE(turn.diagnostics.empty());
}

TEST_CASE("parse_model_output: bad fence yields no action and a diagnostic") {
  const auto turn = parse_model_output("<think>x</think>\n```jump [5]```");
  CHECK_FALSE(turn.action);
  REQUIRE(turn.fence_body);
  CHECK_FALSE(turn.diagnostics.empty());
}

TEST_CASE("parse_model_output: language tag on fence line") {
  const auto turn = parse_model_output("```text\nclick [3] [Next]\n```");
  REQUIRE(turn.action);
  CHECK(*turn.action == Action{Click{3, "Next"}});
}

TEST_CASE("parse_model_output is total on random bytes") {
  testsupport::Rng rng(5);
  const std::string pieces[] = {"<think>", "</think>", "<conclusion>", "</conclusion>", "```",
                                "[", "]", " ", "\n", "click", "stop", "type", "\0", "\xff"};
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto n = testsupport::pick(rng, 30);
    for (std::size_t k = 0; k < n; ++k) {
      if (testsupport::pick(rng, 3) == 0) {
        s += static_cast<char>(testsupport::pick(rng, 256));
      } else {
        s += pieces[testsupport::pick(rng, std::size(pieces))];
      }
    }
    CHECK_NOTHROW(parse_model_output(s));
  }
}
