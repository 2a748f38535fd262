#include "browseragent/ax_tree.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace browseragent;

namespace {

std::string numbered_page(int n) {
  std::string body;
  for (int i = 0; i < n; ++i) body += "<p>line " + std::to_string(i) + "</p>";
  return "<html><head><title>Long</title></head><body>" + body + "</body></html>";
}

// Reference merge: walk children of every node and fold adjacent StaticText names.
std::vector<std::pair<NodeId, std::string>> brute_merge(const AXTree &tree) {
  std::vector<std::pair<NodeId, std::string>> out;
  for (const auto &node : tree.nodes()) {
    const AXNode *prev = nullptr;
    for (const auto id : node.children) {
      const auto *c = tree.find(id);
      if (c->role == Role::StaticText) {
        if (prev != nullptr && prev->role == Role::StaticText) {
          out.back().second += " " + c->name;
        } else {
          out.emplace_back(c->id, c->name);
        }
      }
      prev = c;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("quote_name follows repr") {
  CHECK(quote_name("Edward IV") == "'Edward IV'");
  CHECK(quote_name("it's") == "\"it's\"");
  CHECK(quote_name("say \"hi\"") == "'say \"hi\"'");
  CHECK(quote_name("both ' and \"") == "'both \\' and \"'");
  CHECK(quote_name("a\\b\nc") == "'a\\\\b\\nc'");
  CHECK(quote_name("") == "''");
}

TEST_CASE("ids are base plus pre-order index") {
  const auto tree = build_ax_tree("<html><head><title>T</title></head><body>"
                                  "<a href=\"/A/X\">X</a><input type=\"search\" aria-label=\"Search\">"
                                  "</body></html>",
                                  100, "http://h/A/Y");
  // doc=0 html=1 head=2 title=3 text=4 body=5 a=6 text=7 input=8
  CHECK(tree.root().id == 100);
  CHECK(tree.root().name == "T");
  CHECK(tree.id_span() == 9);
  const auto *link = tree.find(106);
  REQUIRE(link);
  CHECK(link->role == Role::link);
  CHECK(link->url == "http://h/A/X");
  const auto *box = tree.find(108);
  REQUIRE(box);
  CHECK(box->role == Role::textbox);
  CHECK(box->search_box);
  CHECK(tree.find(107) == nullptr);
}

TEST_CASE("render lines for each role") {
  const auto tree = build_ax_tree("<html><head><title>T</title></head><body><h1>Head</h1>"
                                  "<a href=\"http://h/A/X\">X</a><input type=\"text\" placeholder=\"q\" required>"
                                  "<input type=\"checkbox\" aria-label=\"c\" checked><button>Go</button>"
                                  "<img alt=\"pic\">text</body></html>",
                                  1);
  const auto lines = render_lines(tree);
  REQUIRE(lines.size() == 8);
  CHECK(lines[0] == "[1] RootWebArea 'T'");
  CHECK(lines[1] == "[7] heading 'Head'");
  CHECK(lines[2] == "[9] link 'X' url: http://h/A/X");
  CHECK(lines[3] == "[11] textbox 'q' required: True");
  CHECK(lines[4] == "[12] checkbox 'c' checked: true");
  CHECK(lines[5] == "[13] button 'Go'");
  CHECK(lines[6] == "[15] image 'pic'");
  CHECK(lines[7] == "[16] StaticText 'text'");
}

TEST_CASE("hidden and script content is skipped but still consumes ids") {
  const auto tree = build_ax_tree("<body><script>x()</script><div hidden><a href=\"/a\">a</a></div>"
                                  "<a href=\"/b\">b</a></body>",
                                  1);
  const auto lines = render_lines(tree);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].rfind("[8] link 'b'", 0) == 0);
}

TEST_CASE("long StaticText is truncated") {
  const std::string text(700, 'x');
  const auto tree = build_ax_tree("<p>" + text + "</p>", 1);
  const auto lines = render_lines(tree);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "[3] StaticText '" + std::string(kMaxStaticTextChars, 'x') + "...'");
}

TEST_CASE("merge_consecutive_text: example") {
  const auto tree = build_ax_tree(
      "<p>These two brothers were the only sons of King <a href=\"/A/E4\">Edward IV</a> and "
      "<a href=\"/A/EW\">Elizabeth Woodville</a></p><div>one<b>two</b>three</div>",
      1);
  const auto merged = merge_consecutive_text(tree);
  const auto lines = render_lines(merged);
  std::vector<std::string> names;
  for (const auto &n : merged.nodes()) {
    if (n.role == Role::StaticText) names.push_back(n.name);
  }
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "These two brothers were the only sons of King");
  CHECK(names[1] == "and");
  CHECK(names[2] == "one two three");
  CHECK(merged.id_span() == tree.id_span());
}

TEST_CASE("merge_consecutive_text matches a brute-force fold and is idempotent") {
  testsupport::Rng rng(3);
  const char *frags[] = {"<b>x</b>", "word", "<a href=\"/z\">l</a>", "<i>y</i>", " ", "<p>p</p>",
                         "<span>s</span>", "<div>", "</div>", "<!--c-->"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string html = "<body>";
    const auto n = 1 + testsupport::pick(rng, 25);
    for (std::size_t i = 0; i < n; ++i) html += frags[testsupport::pick(rng, std::size(frags))];
    html += "</body>";
    const auto tree = build_ax_tree(html, 1);
    const auto merged = merge_consecutive_text(tree);
    std::vector<std::pair<NodeId, std::string>> got;
    for (const auto &node : merged.nodes()) {
      if (node.role == Role::StaticText) got.emplace_back(node.id, node.name);
    }
    std::sort(got.begin(), got.end());
    INFO(html);
    CHECK(got == brute_merge(tree));
    CHECK(render_lines(merge_consecutive_text(merged)) == render_lines(merged));
  }
}

TEST_CASE("viewport windowing and footer") {
  const auto tree = build_ax_tree(numbered_page(199), 1);
  const auto total = render_lines(tree).size();
  REQUIRE(total == 200);

  Viewport vp;
  auto obs = render_observation(tree, vp);
  CHECK(obs.find("(0 lines above, 140 lines below)") != std::string::npos);
  CHECK(std::count(obs.begin(), obs.end(), '\n') == 61);

  CHECK(scroll_down(vp, total));
  CHECK(vp.offset_lines == 60);
  obs = render_observation(tree, vp);
  CHECK(obs.find("(60 lines above, 80 lines below)") != std::string::npos);

  CHECK(scroll_down(vp, total));
  CHECK(scroll_down(vp, total));
  CHECK(vp.offset_lines == 180);
  CHECK_FALSE(scroll_down(vp, total));
  obs = render_observation(tree, vp);
  CHECK(obs.find("(180 lines above, 0 lines below)") != std::string::npos);

  CHECK(scroll_up(vp));
  CHECK(vp.offset_lines == 120);
  vp.offset_lines = 0;
  CHECK_FALSE(scroll_up(vp));
}

TEST_CASE("short page has no footer") {
  const auto tree = build_ax_tree(numbered_page(3), 1);
  const auto obs = render_observation(tree, Viewport{});
  CHECK(obs.find("lines above") == std::string::npos);
  std::istringstream in(obs);
  std::string first;
  std::getline(in, first);
  CHECK(first == "[1] RootWebArea 'Long'");
}

TEST_CASE("build is deterministic and total on noise") {
  testsupport::Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    const auto n = testsupport::pick(rng, 200);
    for (std::size_t k = 0; k < n; ++k) s += "<>/a=\"' x!-"[testsupport::pick(rng, 11)];
    const auto a = build_ax_tree(s, 5);
    const auto b = build_ax_tree(s, 5);
    CHECK(render_lines(a) == render_lines(b));
    CHECK(a.root().id == 5);
  }
  const auto nul = build_ax_tree(std::string("a\0b", 3), 1);
  CHECK_FALSE(nul.diagnostics().empty());
}
