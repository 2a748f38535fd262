#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace browseragent {

using NodeId = std::int64_t;

enum class Role {
  RootWebArea,
  link,
  button,
  textbox,
  checkbox,
  StaticText,
  heading,
  image,
  generic,
};

std::string_view to_string(Role role);

struct AXNode {
  NodeId id = 0;
  Role role = Role::generic;
  std::string name;
  std::optional<std::string> url; // links only
  std::map<std::string, std::string> attrs;
  std::vector<NodeId> children;
  /// Marks the search box that submits queries to the corpus index.
  bool search_box = false;
};

/// Immutable-after-build accessibility tree. Nodes are kept in DFS pre-order.
class AXTree {
public:
  AXTree() = default;

  const AXNode &root() const { return nodes_.front(); }
  const AXNode *find(NodeId id) const;
  AXNode *find_mutable(NodeId id);
  const std::vector<AXNode> &nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// Number of source nodes consumed when assigning ids; the next page in a
  /// session starts at id_base + id_span().
  NodeId id_span() const { return id_span_; }

  /// Diagnostics from a lenient parse (empty on success).
  const std::vector<std::string> &diagnostics() const { return diagnostics_; }

private:
  friend AXTree build_ax_tree(std::string_view html, NodeId id_base,
                              std::string_view page_url);
  friend AXTree merge_consecutive_text(const AXTree &tree);

  void reindex();

  std::vector<AXNode> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  NodeId id_span_ = 1;
  std::vector<std::string> diagnostics_;
};

struct Viewport {
  std::size_t offset_lines = 0;
  std::size_t height_lines = 60;
};

inline constexpr std::size_t kDefaultViewportHeight = 60;
inline constexpr std::size_t kMaxStaticTextChars = 500;

/// Builds the tree for one page. Ids follow document pre-order over every
/// source node (elements, text, comments), starting at id_base for the root;
/// nodes without an accessible role leave gaps.
AXTree build_ax_tree(std::string_view html, NodeId id_base);

/// As above; link hrefs are resolved against page_url.
AXTree build_ax_tree(std::string_view html, NodeId id_base, std::string_view page_url);

/// Replaces every maximal run of sibling StaticText nodes with one node named
/// by the space-joined run. The survivor keeps the first id.
AXTree merge_consecutive_text(const AXTree &tree);

/// All rendered lines in DFS order, before windowing.
std::vector<std::string> render_lines(const AXTree &tree);

/// Windowed observation text. A `(k lines above, m lines below)` footer is
/// appended when the window clips the page.
std::string render_observation(const AXTree &tree, const Viewport &viewport);

/// Quotes a name the way Python's repr() quotes a str.
std::string quote_name(std::string_view name);

/// Scroll by one viewport height. Returns false when already at the bound.
bool scroll_down(Viewport &viewport, std::size_t total_lines);
bool scroll_up(Viewport &viewport);

} // namespace browseragent
