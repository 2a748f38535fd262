#include "browseragent/corpus.hpp"

#include "browseragent/errors.hpp"
#include "browseragent/html.hpp"
#include "browseragent/url.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace browseragent {

namespace {

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;
constexpr std::uint32_t kTitleWeight = 3;

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

bool skipped(const html::Node &node) {
  static const std::set<std::string, std::less<>> kSkip = {
      "head", "script", "style", "noscript", "template", "title"};
  return node.kind == html::NodeKind::Element &&
         (kSkip.contains(node.tag) || node.has_attr("hidden"));
}

std::string collapse(std::string_view text) {
  std::string out;
  bool space = false;
  for (const char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

bool inline_element(const html::Node &node) {
  static const std::set<std::string, std::less<>> kInline = {
      "a",    "abbr", "b",    "bdi", "cite", "code", "em",  "font", "i",   "label", "mark",
      "q",    "s",    "small", "span", "strong", "sub", "sup", "time", "u", "var"};
  return kInline.contains(node.tag);
}

// Block boundaries become spaces; inline markup joins its text directly.
std::string visible_text(const html::Document &doc, std::size_t index) {
  constexpr auto kBreak = static_cast<std::size_t>(-1);
  std::string raw;
  std::vector<std::size_t> stack{index};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    if (i == kBreak) {
      raw += ' ';
      continue;
    }
    const auto &node = doc.nodes[i];
    if (node.kind == html::NodeKind::Text) {
      raw += node.text;
      continue;
    }
    if (node.kind == html::NodeKind::Comment || skipped(node)) continue;
    const bool block = node.kind == html::NodeKind::Element && !inline_element(node);
    if (block) {
      raw += ' ';
      stack.push_back(kBreak);
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return collapse(raw);
}

std::size_t find_element(const html::Document &doc, std::string_view tag) {
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (doc.nodes[i].kind == html::NodeKind::Element && doc.nodes[i].tag == tag) return i;
  }
  return doc.size();
}

std::string last_segment(std::string_view u) {
  auto p = url::path(u);
  while (!p.empty() && p.back() == '/') p.pop_back();
  const auto slash = p.rfind('/');
  auto seg = url::percent_decode(slash == std::string::npos ? p : p.substr(slash + 1));
  std::replace(seg.begin(), seg.end(), '_', ' ');
  return seg;
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(text[i])) ++i;
    const auto start = i;
    while (i < text.size() && is_word_byte(text[i])) ++i;
    if (i > start) {
      std::string tok(text.substr(start, i - start));
      for (auto &c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

std::string group_thousands(std::size_t n) {
  auto digits = std::to_string(n);
  std::string out;
  const auto len = digits.size();
  for (std::size_t i = 0; i < len; ++i) {
    if (i > 0 && (len - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

Corpus::Corpus(std::string home_url, std::map<std::string, std::string> pages,
               std::string content)
    : home_url_(std::move(home_url)), content_name_(std::move(content)),
      pages_(std::move(pages)) {
  if (!pages_.contains(home_url_)) {
    throw Error(ErrorCode::ManifestError, "home_url '" + home_url_ + "' is not a corpus page");
  }
  origin_ = url::origin(home_url_);

  std::size_t total_len = 0;
  for (const auto &[page_url, source] : pages_) {
    const auto doc_index = docs_.size();
    const auto dom = html::parse(source);
    Doc doc;
    doc.url = page_url;

    const auto title_el = find_element(dom, "title");
    if (title_el < dom.size()) doc.title = visible_text(dom, title_el);
    if (doc.title.empty()) {
      // Raw text children of <title>.
      if (title_el < dom.size()) {
        std::string t;
        for (const auto c : dom.nodes[title_el].children) t += dom.nodes[c].text;
        doc.title = collapse(t);
      }
    }
    if (doc.title.empty()) {
      const auto h1 = find_element(dom, "h1");
      doc.title = h1 < dom.size() ? visible_text(dom, h1) : last_segment(page_url);
    }
    auto main_el = find_element(dom, "main");
    if (main_el == dom.size()) main_el = find_element(dom, "body");
    doc.body = visible_text(dom, main_el == dom.size() ? 0 : main_el);

    const auto title_tokens = tokenize(doc.title);
    const auto body_tokens = tokenize(doc.body);
    doc.title_tokens = title_tokens.size();
    doc.body_tokens = body_tokens.size();
    total_len += kTitleWeight * doc.title_tokens + doc.body_tokens;

    std::unordered_map<std::string, Posting> local;
    for (const auto &t : title_tokens) {
      auto &p = local.try_emplace(t, Posting{doc_index, {}, 0}).first->second;
      ++p.title_tf;
    }
    for (std::uint32_t pos = 0; pos < body_tokens.size(); ++pos) {
      auto &p = local.try_emplace(body_tokens[pos], Posting{doc_index, {}, 0}).first->second;
      p.positions.push_back(pos);
    }
    for (auto &[term, posting] : local) postings_[term].push_back(std::move(posting));

    // Dangling internal links.
    std::set<std::string> reported;
    for (const auto &node : dom.nodes) {
      if (node.kind != html::NodeKind::Element || node.tag != "a") continue;
      const auto href = node.attr("href");
      if (!href) continue;
      const auto target = url::strip_fragment(url::resolve(page_url, *href));
      if (url::origin(target) != origin_) continue;
      if (pages_.contains(target) || is_search_url(target) || is_random_url(target)) continue;
      if (reported.insert(target).second) {
        warnings_.push_back("dangling link on " + page_url + ": " + target);
      }
    }
    docs_.push_back(std::move(doc));
  }
  avg_len_ = docs_.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(docs_.size());
}

const std::string *Corpus::page(std::string_view u) const {
  const auto it = pages_.find(url::strip_fragment(u));
  return it == pages_.end() ? nullptr : &it->second;
}

bool Corpus::is_search_url(std::string_view u) const {
  return url::origin(u) == origin_ && url::path(u) == "/search";
}

bool Corpus::is_random_url(std::string_view u) const {
  return url::origin(u) == origin_ && url::path(u) == "/random";
}

std::string Corpus::search_url(std::string_view query, std::size_t page) const {
  return origin_ + "/search?content=" + url::percent_encode(content_name_) +
         "&pattern=" + url::percent_encode(query) +
         "&start=" + std::to_string(page * kResultsPerPage);
}

std::string Corpus::random_url() const {
  return origin_ + "/random?content=" + url::percent_encode(content_name_);
}

std::vector<SearchHit> Corpus::rank(std::string_view query) const {
  auto terms = tokenize(query);
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

  const auto n_docs = static_cast<double>(docs_.size());
  std::vector<double> scores(docs_.size(), 0.0);
  std::vector<bool> hit(docs_.size(), false);
  for (const auto &term : terms) {
    const auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const auto &p : it->second) {
      const auto &doc = docs_[p.doc];
      const double tf = kTitleWeight * p.title_tf + static_cast<double>(p.positions.size());
      const double len = static_cast<double>(kTitleWeight * doc.title_tokens + doc.body_tokens);
      const double norm = kBm25K1 * (1.0 - kBm25B + kBm25B * len / std::max(avg_len_, 1.0));
      scores[p.doc] += idf * tf * (kBm25K1 + 1.0) / (tf + norm);
      hit[p.doc] = true;
    }
  }

  std::vector<SearchHit> hits;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    if (!hit[d]) continue;
    hits.push_back({docs_[d].url, docs_[d].title, scores[d], {}, docs_[d].body_tokens});
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit &a, const SearchHit &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.url < b.url;
  });
  for (auto &h : hits) {
    const auto it = std::find_if(docs_.begin(), docs_.end(),
                                 [&](const Doc &d) { return d.url == h.url; });
    h.snippet = make_snippet(*it, terms);
  }
  return hits;
}

std::string Corpus::make_snippet(const Doc &doc, const std::vector<std::string> &terms) const {
  const auto &body = doc.body;
  // Anchor on the first body occurrence of the rarest query term present.
  std::size_t anchor_token = 0;
  double best_idf = -1.0;
  for (const auto &term : terms) {
    const auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    for (const auto &p : it->second) {
      if (docs_[p.doc].url != doc.url || p.positions.empty()) continue;
      const double idf = 1.0 / static_cast<double>(it->second.size());
      if (idf > best_idf) {
        best_idf = idf;
        anchor_token = p.positions.front();
      }
    }
  }
  // Byte offset of the anchor token.
  std::size_t pos = 0;
  std::size_t token = 0;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && !is_word_byte(body[i])) ++i;
    if (i >= body.size()) break;
    if (token == anchor_token) {
      pos = i;
      break;
    }
    while (i < body.size() && is_word_byte(body[i])) ++i;
    ++token;
  }

  std::size_t start = pos > 60 ? pos - 60 : 0;
  if (start > 0) {
    const auto space = body.find(' ', start);
    start = space == std::string::npos || space >= pos ? pos : space + 1;
  }
  std::string prefix = start > 0 ? "..." : "";
  const std::size_t budget = kMaxSnippetChars - prefix.size();
  if (body.size() - start <= budget) return prefix + body.substr(start);
  auto cut = body.substr(start, budget - 3);
  if (const auto space = cut.rfind(' '); space != std::string::npos && space > 0) {
    cut.resize(space);
  }
  while (!cut.empty() && (static_cast<unsigned char>(cut.back()) & 0xC0) == 0x80) cut.pop_back();
  if (!cut.empty() && (static_cast<unsigned char>(cut.back()) & 0x80) != 0) cut.pop_back();
  return prefix + cut + "...";
}

Corpus load_corpus(const std::filesystem::path &manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open manifest " + manifest_path.string());
  }
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::ManifestError, std::string("invalid manifest json: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("home_url") ||
      !manifest["home_url"].is_string()) {
    throw Error(ErrorCode::ManifestError, "manifest lacks a string home_url");
  }
  if (!manifest.contains("pages") || !manifest["pages"].is_object()) {
    throw Error(ErrorCode::ManifestError, "manifest lacks a pages object");
  }
  const auto dir = manifest_path.parent_path();
  std::map<std::string, std::string> pages;
  for (const auto &[page_url, rel] : manifest["pages"].items()) {
    if (!rel.is_string()) {
      throw Error(ErrorCode::ManifestError, "page path for " + page_url + " is not a string");
    }
    const auto file = dir / rel.get<std::string>();
    std::ifstream page_in(file, std::ios::binary);
    if (!page_in) throw Error(ErrorCode::MissingFile, "missing page file " + file.string());
    std::ostringstream buf;
    buf << page_in.rdbuf();
    pages.emplace(page_url, buf.str());
  }
  const auto content = manifest.value("content", std::string("wikipedia"));
  return Corpus(manifest["home_url"].get<std::string>(), std::move(pages), content);
}

std::string page_header_html(const Corpus &corpus) {
  const auto main_page = corpus.origin() + "/" + corpus.content() + "/";
  std::string out;
  out += "<div id=\"kiwixtoolbar\" class=\"ui-widget-header\">\n";
  out += "  <div class=\"kiwix_centered\">\n";
  out += "    <form class=\"kiwixsearch\" method=\"GET\" action=\"/search\">\n";
  out += "      <input type=\"hidden\" name=\"content\" value=\"" + html::escape(corpus.content()) +
         "\">\n";
  out += "      <input type=\"search\" name=\"pattern\" autocomplete=\"off\" "
         "aria-label=\"Search &#39;Wikipedia&#39;\">\n";
  out += "    </form>\n";
  out += "    <input type=\"checkbox\" id=\"kiwix_button_show_toggle\">\n";
  out += "    <div class=\"kiwix_button_cont\">\n";
  out += "      <a id=\"kiwix_serve_taskbar_library_button\" title=\"Go to welcome page\" "
         "href=\"" + html::escape(corpus.home_url()) + "\"></a>\n";
  out += "      <a id=\"kiwix_serve_taskbar_home_button\" title=\"Go to the main page of "
         "&#39;Wikipedia&#39;\" href=\"" + html::escape(main_page) + "\"></a>\n";
  out += "      <button>Wikipedia</button>\n";
  out += "      <a id=\"kiwix_serve_taskbar_random_button\" title=\"Go to a randomly selected "
         "page\" href=\"" + html::escape(corpus.random_url()) + "\"></a>\n";
  out += "    </div>\n";
  out += "  </div>\n";
  out += "</div>\n";
  return out;
}

std::string search(const Corpus &corpus, std::string_view query, std::size_t page) {
  const auto trimmed = collapse(query);
  if (trimmed.empty()) throw Error(ErrorCode::BadParameter, "search query is empty");
  const auto hits = corpus.rank(trimmed);
  const auto total = hits.size();
  const auto first = std::min(total, page * kResultsPerPage);
  const auto last = std::min(total, first + kResultsPerPage);

  std::string out;
  out += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>Search: " + html::escape(trimmed) + "</title>\n";
  out += "<link type=\"text/css\" href=\"/skin/search_results.css\" rel=\"Stylesheet\">\n";
  out += "</head>\n<body>\n";
  out += page_header_html(corpus);
  out += "<div class=\"results\">\n";
  out += "<div class=\"header\">Results " +
         (total == 0 ? std::string("0-0") : group_thousands(first + 1) + "-" + group_thousands(last)) +
         " of " + group_thousands(total) + " for \"" + html::escape(trimmed) + "\"</div>\n";
  out += "<ul>\n";
  for (auto i = first; i < last; ++i) {
    const auto &h = hits[i];
    out += "<li><a href=\"" + html::escape(h.url) + "\">" + html::escape(h.title) + "</a>";
    out += "<div class=\"snippet\">" + html::escape(h.snippet) + "</div>";
    out += "<div class=\"book-title\">from Wikipedia</div>";
    out += "<div class=\"informations\">" + group_thousands(h.word_count) + " words</div></li>\n";
  }
  out += "</ul>\n";
  if (last < total) {
    out += "<div class=\"pagination\"><a href=\"" +
           html::escape(corpus.search_url(trimmed, page + 1)) + "\">Next</a></div>\n";
  }
  out += "</div>\n</body>\n</html>\n";
  return out;
}

} // namespace browseragent
