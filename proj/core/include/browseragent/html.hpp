#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace browseragent::html {

enum class NodeKind { Document, Element, Text, Comment };

struct Node {
  NodeKind kind = NodeKind::Element;
  std::string tag;  // lowercase, elements only
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text; // text and comment nodes
  std::vector<std::size_t> children;

  std::optional<std::string_view> attr(std::string_view name) const;
  bool has_attr(std::string_view name) const { return attr(name).has_value(); }
};

// Nodes are stored in creation order, which is document pre-order.
// Index 0 is the document node.
struct Document {
  std::vector<Node> nodes;

  const Node &root() const { return nodes.front(); }
  std::size_t size() const { return nodes.size(); }
};

/// Tolerant tag-soup parser: unknown end tags are dropped, unclosed elements
/// are closed at end of input, `<li>` and `<p>` close an open sibling.
Document parse(std::string_view html);

/// Decodes character references (`&amp;`, `&#39;`, `&#x2014;`, ...).
std::string decode_entities(std::string_view text);

/// Escapes text for use in element content or a quoted attribute.
std::string escape(std::string_view text);

} // namespace browseragent::html
