#include "browseragent/url.hpp"

#include <cctype>

namespace browseragent::url {

namespace {

std::size_t scheme_end(std::string_view url) {
  for (std::size_t i = 0; i < url.size(); ++i) {
    const auto c = static_cast<unsigned char>(url[i]);
    if (url[i] == ':') return i > 0 ? i : std::string_view::npos;
    if (std::isalnum(c) == 0 && url[i] != '+' && url[i] != '-' && url[i] != '.') break;
  }
  return std::string_view::npos;
}

std::string normalize_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i <= path.size()) {
    auto j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    const auto seg = path.substr(i, j - i);
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
    } else if (seg != "." && !(seg.empty() && j != path.size())) {
      parts.emplace_back(seg);
    }
    i = j + 1;
  }
  std::string out;
  for (const auto &p : parts) out += "/" + p;
  if (out.empty()) out = "/";
  return out;
}

} // namespace

std::string origin(std::string_view url) {
  const auto se = scheme_end(url);
  if (se == std::string_view::npos || url.substr(se + 1, 2) != "//") return {};
  const auto host_start = se + 3;
  const auto host_end = url.find_first_of("/?#", host_start);
  return std::string(url.substr(0, host_end == std::string_view::npos ? url.size() : host_end));
}

std::string strip_fragment(std::string_view url) {
  return std::string(url.substr(0, url.find('#')));
}

std::string path(std::string_view url) {
  const auto o = origin(url);
  auto rest = url.substr(o.size());
  rest = rest.substr(0, rest.find_first_of("?#"));
  return std::string(rest);
}

std::string resolve(std::string_view base, std::string_view href) {
  if (href.empty()) return strip_fragment(base);
  if (scheme_end(href) != std::string_view::npos) return std::string(href);
  const auto base_origin = origin(base);
  if (href.starts_with("//")) {
    const auto se = scheme_end(base);
    return std::string(base.substr(0, se == std::string_view::npos ? 0 : se + 1)) +
           std::string(href);
  }
  if (href.front() == '#') return strip_fragment(base) + std::string(href);
  const auto base_path = path(base);
  if (href.front() == '?') return base_origin + base_path + std::string(href);

  std::string_view href_path = href;
  std::string suffix;
  if (const auto q = href.find_first_of("?#"); q != std::string_view::npos) {
    href_path = href.substr(0, q);
    suffix = std::string(href.substr(q));
  }
  std::string joined;
  if (href_path.front() == '/') {
    joined = std::string(href_path);
  } else {
    const auto slash = base_path.rfind('/');
    joined = (slash == std::string::npos ? std::string("/") : base_path.substr(0, slash + 1)) +
             std::string(href_path);
  }
  return base_origin + normalize_path(joined) + suffix;
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) != 0 || ch == '-' || ch == '_' || ch == '.' || ch == '~') {
      out += ch;
    } else if (ch == ' ') {
      out += '+';
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+') {
      out += ' ';
    } else if (text[i] == '%' && i + 2 < text.size() &&
               std::isxdigit(static_cast<unsigned char>(text[i + 1])) != 0 &&
               std::isxdigit(static_cast<unsigned char>(text[i + 2])) != 0) {
      out += static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

std::string query_param(std::string_view url, std::string_view key) {
  const auto q = url.find('?');
  if (q == std::string_view::npos) return {};
  auto query = url.substr(q + 1);
  query = query.substr(0, query.find('#'));
  std::size_t i = 0;
  while (i <= query.size()) {
    auto j = query.find('&', i);
    if (j == std::string_view::npos) j = query.size();
    const auto pair = query.substr(i, j - i);
    const auto eq = pair.find('=');
    if (pair.substr(0, eq) == key) {
      return eq == std::string_view::npos ? std::string() : percent_decode(pair.substr(eq + 1));
    }
    i = j + 1;
  }
  return {};
}

} // namespace browseragent::url
