#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace browseragent::url {

/// `scheme://host[:port]`, or empty when the url has no authority.
std::string origin(std::string_view url);

/// Resolves an href against the page it appears on.
std::string resolve(std::string_view base, std::string_view href);

std::string strip_fragment(std::string_view url);

std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

/// Value of a query parameter, decoded ('+' is a space). Empty if absent.
std::string query_param(std::string_view url, std::string_view key);

/// Path component without query or fragment.
std::string path(std::string_view url);

} // namespace browseragent::url
