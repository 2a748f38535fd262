#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace browseragent {

struct SearchHit {
  std::string url;
  std::string title;
  double score = 0.0;
  std::string snippet;
  std::size_t word_count = 0;
};

inline constexpr std::size_t kResultsPerPage = 25;
inline constexpr std::size_t kMaxSnippetChars = 300;

/// Offline wiki snapshot: url -> html, a landing page with a search box, and
/// a BM25 index over title + body. Shared read-only between sessions.
class Corpus {
public:
  /// Builds the index. `home_url` must be one of `pages`. `content` names
  /// the snapshot in search and random-page urls.
  Corpus(std::string home_url, std::map<std::string, std::string> pages,
         std::string content = "wikipedia");

  const std::string &home_url() const { return home_url_; }
  const std::string &origin() const { return origin_; }
  const std::string &content() const { return content_name_; }
  std::size_t size() const { return docs_.size(); }

  /// Page html for a url (fragment ignored), or nullptr.
  const std::string *page(std::string_view url) const;

  /// True for urls the browser synthesizes (search results, random page).
  bool is_search_url(std::string_view url) const;
  bool is_random_url(std::string_view url) const;
  std::string search_url(std::string_view query, std::size_t page) const;
  std::string random_url() const;

  /// Ranked hits: BM25 score descending, url ascending on ties.
  std::vector<SearchHit> rank(std::string_view query) const;

  /// Number of distinct terms in the index.
  std::size_t vocabulary_size() const { return postings_.size(); }

  /// Dangling internal links found while indexing.
  const std::vector<std::string> &warnings() const { return warnings_; }

  /// Url of the n-th page in url order.
  const std::string &url_at(std::size_t n) const { return docs_[n].url; }

private:
  struct Posting {
    std::size_t doc;
    std::vector<std::uint32_t> positions; // body token positions
    std::uint32_t title_tf = 0;
  };
  struct Doc {
    std::string url;
    std::string title;
    std::string body; // whitespace-collapsed visible text
    std::size_t body_tokens = 0;
    std::size_t title_tokens = 0;
  };

  std::string make_snippet(const Doc &doc, const std::vector<std::string> &terms) const;

  std::string home_url_;
  std::string origin_;
  std::string content_name_;
  std::map<std::string, std::string> pages_;
  std::vector<Doc> docs_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avg_len_ = 0.0;
  std::vector<std::string> warnings_;
};

/// Lowercased alphanumeric tokens; bytes >= 0x80 count as word characters.
std::vector<std::string> tokenize(std::string_view text);

/// Reads `{"home_url": str, "pages": {url: relative_path}}`; paths are
/// relative to the manifest. Throws Error(ManifestError | MissingFile).
Corpus load_corpus(const std::filesystem::path &manifest_path);

/// Results page html for the given zero-based results page.
/// Throws Error(BadParameter) when the query is blank.
std::string search(const Corpus &corpus, std::string_view query, std::size_t page);

/// Shared page chrome (welcome link, search box, main-page link) used by
/// synthesized pages.
std::string page_header_html(const Corpus &corpus);

/// `1,234` style grouping.
std::string group_thousands(std::size_t n);

} // namespace browseragent
