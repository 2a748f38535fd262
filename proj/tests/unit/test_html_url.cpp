#include "browseragent/html.hpp"
#include "browseragent/url.hpp"

#include <doctest.h>

using namespace browseragent;

TEST_CASE("html::parse: pre-order node storage") {
  const auto doc = html::parse("<div><p>a</p><!--c--><span>b</span></div>");
  REQUIRE(doc.size() == 7);
  CHECK(doc.nodes[0].kind == html::NodeKind::Document);
  CHECK(doc.nodes[1].tag == "div");
  CHECK(doc.nodes[2].tag == "p");
  CHECK(doc.nodes[3].text == "a");
  CHECK(doc.nodes[4].kind == html::NodeKind::Comment);
  CHECK(doc.nodes[5].tag == "span");
  CHECK(doc.nodes[6].text == "b");
}

TEST_CASE("html::parse: tolerant of tag soup") {
  const auto doc = html::parse("<ul><li>one<li>two</ul></bogus><p>x<p>y");
  std::size_t li = 0, p = 0;
  for (const auto &n : doc.nodes) {
    li += n.tag == "li";
    p += n.tag == "p";
  }
  CHECK(li == 2);
  CHECK(p == 2);
  const auto &ul = doc.nodes[1];
  CHECK(ul.children.size() == 2);
}

TEST_CASE("html::parse: attributes are lowercased and decoded") {
  const auto doc = html::parse("<A HREF=\"/x?a=1&amp;b=2\" title='t'>x</A>");
  REQUIRE(doc.size() >= 2);
  CHECK(doc.nodes[1].tag == "a");
  CHECK(doc.nodes[1].attr("href") == "/x?a=1&b=2");
  CHECK(doc.nodes[1].attr("title") == "t");
  CHECK_FALSE(doc.nodes[1].has_attr("id"));
}

TEST_CASE("decode_entities and escape") {
  CHECK(html::decode_entities("a &amp; b &lt;c&gt; &#39;d&#39; &#x41;") == "a & b <c> 'd' A");
  CHECK(html::decode_entities("&#x2014;") == "\xE2\x80\x94");
  CHECK(html::decode_entities("&unknown; &") == "&unknown; &");
  CHECK(html::escape("<a href=\"x\">&</a>") == "&lt;a href=&quot;x&quot;&gt;&amp;&lt;/a&gt;");
  for (const auto *s : {"plain", "a<b>&c\"d'e", ""}) {
    CHECK(html::decode_entities(html::escape(s)) == s);
  }
}

TEST_CASE("url helpers") {
  CHECK(url::origin("http://kiwix.local/A/Foo?x=1") == "http://kiwix.local");
  CHECK(url::origin("https://h:8080/p") == "https://h:8080");
  CHECK(url::origin("/relative") == "");
  CHECK(url::resolve("http://h/A/Foo", "Bar") == "http://h/A/Bar");
  CHECK(url::resolve("http://h/A/Foo", "/B/Baz") == "http://h/B/Baz");
  CHECK(url::resolve("http://h/A/Foo", "http://other/x") == "http://other/x");
  CHECK(url::resolve("http://h/A/B/Foo", "../C") == "http://h/A/C");
  CHECK(url::strip_fragment("http://h/A#sec") == "http://h/A");
  CHECK(url::path("http://h/A/B?q=1#f") == "/A/B");
  CHECK(url::query_param("http://h/search?content=w&pattern=Skin+Yard&start=25", "pattern") ==
        "Skin Yard");
  CHECK(url::query_param("http://h/search?start=25", "start") == "25");
  CHECK(url::query_param("http://h/search?start=25", "missing") == "");
}

TEST_CASE("percent encoding round trip") {
  for (const auto *s : {"Princes in the Tower", "a&b=c?d", "U.S. (Seattle)", "\xC3\xA9t\xC3\xA9", ""}) {
    CHECK(url::percent_decode(url::percent_encode(s)) == s);
  }
  CHECK(url::percent_encode("a b&c") .find(' ') == std::string::npos);
}
