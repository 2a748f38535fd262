#pragma once

#include "browseragent/corpus.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace testsupport {

inline std::filesystem::path fixture_dir() { return BROWSERAGENT_FIXTURE_DIR; }

inline std::filesystem::path fixture(const std::string &rel) { return fixture_dir() / rel; }

/// The generated offline wiki, loaded once per process.
inline std::shared_ptr<const browseragent::Corpus> fixture_corpus() {
  static const auto corpus = std::make_shared<const browseragent::Corpus>(
      browseragent::load_corpus(fixture("corpus/manifest.json")));
  return corpus;
}

inline std::string toy_page(const std::string &title, const std::string &body) {
  return "<html><head><title>" + title + "</title></head><body><h1>" + title + "</h1>" + body +
         "</body></html>";
}

/// Small corpus: home with a search box, and pages linked in a chain.
inline std::shared_ptr<const browseragent::Corpus> toy_corpus(int pages = 5) {
  std::map<std::string, std::string> html;
  std::string links;
  for (int i = 0; i < pages; ++i) {
    const auto next = (i + 1) % pages;
    html["http://toy/A/P" + std::to_string(i)] = toy_page(
        "Page " + std::to_string(i),
        "<p>Body of page " + std::to_string(i) + ".</p><a href=\"P" + std::to_string(next) +
            "\">next</a>");
    links += "<li><a href=\"/A/P" + std::to_string(i) + "\">P" + std::to_string(i) + "</a></li>";
  }
  html["http://toy/"] = toy_page(
      "Home", "<form><input type=\"search\" aria-label=\"Search\"></form>"
              "<input type=\"checkbox\" id=\"c\"><ul>" + links + "</ul>");
  return std::make_shared<const browseragent::Corpus>("http://toy/", std::move(html));
}

} // namespace testsupport
