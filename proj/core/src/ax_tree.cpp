#include "browseragent/ax_tree.hpp"

#include "browseragent/html.hpp"
#include "browseragent/url.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace browseragent {

namespace {

constexpr std::array<std::string_view, 8> kSkippedElements = {
    "head", "script", "style", "noscript", "template", "meta", "link", "iframe"};

// Unnamed inline wrappers are transparent: their children attach to the
// nearest rendered ancestor.
constexpr std::array<std::string_view, 20> kInlineElements = {
    "b",    "i",     "em",  "strong", "span", "small", "sup",  "sub", "abbr", "cite",
    "code", "font",  "u",   "s",      "mark", "time",  "label", "q",  "bdi",  "var"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N> &set, std::string_view v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (const char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

bool is_hidden(const html::Node &el) {
  if (el.has_attr("hidden")) return true;
  if (auto v = el.attr("aria-hidden"); v && *v == "true") return true;
  if (el.tag == "input") {
    if (auto t = el.attr("type"); t && *t == "hidden") return true;
  }
  return false;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string first_attr(const html::Node &el, std::initializer_list<std::string_view> names) {
  for (const auto name : names) {
    if (auto v = el.attr(name); v && !v->empty()) return collapse_whitespace(*v);
  }
  return {};
}

// Concatenated visible text of a subtree; image alt text counts.
std::string subtree_text(const html::Document &doc, std::size_t index) {
  std::string raw;
  std::vector<std::size_t> stack{index};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const auto &node = doc.nodes[i];
    if (node.kind == html::NodeKind::Text) {
      raw += node.text;
      continue;
    }
    if (node.kind != html::NodeKind::Element && node.kind != html::NodeKind::Document) continue;
    if (node.kind == html::NodeKind::Element &&
        (contains(kSkippedElements, node.tag) || is_hidden(node))) {
      continue;
    }
    if (node.tag == "img") {
      raw += " " + first_attr(node, {"alt"}) + " ";
      continue;
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return collapse_whitespace(raw);
}

std::string document_title(const html::Document &doc) {
  for (const auto &node : doc.nodes) {
    if (node.kind == html::NodeKind::Element && node.tag == "title") {
      std::string text;
      for (const auto child : node.children) text += doc.nodes[child].text;
      return collapse_whitespace(text);
    }
  }
  return {};
}

std::string python_bool(bool v) { return v ? "True" : "False"; }

} // namespace

std::string_view to_string(Role role) {
  switch (role) {
  case Role::RootWebArea: return "RootWebArea";
  case Role::link: return "link";
  case Role::button: return "button";
  case Role::textbox: return "textbox";
  case Role::checkbox: return "checkbox";
  case Role::StaticText: return "StaticText";
  case Role::heading: return "heading";
  case Role::image: return "image";
  case Role::generic: return "generic";
  }
  return "generic";
}

const AXNode *AXTree::find(NodeId id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

AXNode *AXTree::find_mutable(NodeId id) {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

void AXTree::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].id, i);
}

AXTree build_ax_tree(std::string_view html_text, NodeId id_base) {
  return build_ax_tree(html_text, id_base, {});
}

AXTree build_ax_tree(std::string_view html_text, NodeId id_base, std::string_view page_url) {
  AXTree tree;
  AXNode root;
  root.id = id_base;
  root.role = Role::RootWebArea;

  if (html_text.find('\0') != std::string_view::npos) {
    tree.diagnostics_.push_back("ParseFailure: input contains NUL bytes");
    tree.nodes_.push_back(std::move(root));
    tree.reindex();
    return tree;
  }

  const auto doc = html::parse(html_text);
  root.name = document_title(doc);
  tree.id_span_ = static_cast<NodeId>(doc.size());
  tree.nodes_.push_back(std::move(root));

  // Pre-order walk. Each frame carries the index of the AX parent in nodes_.
  struct Frame {
    std::size_t dom;
    std::size_t ax_parent;
  };
  std::vector<Frame> stack;
  const auto &doc_root = doc.root();
  for (auto it = doc_root.children.rbegin(); it != doc_root.children.rend(); ++it) {
    stack.push_back({*it, 0});
  }

  auto emit = [&](AXNode node, std::size_t parent) {
    const auto index = tree.nodes_.size();
    tree.nodes_[parent].children.push_back(node.id);
    tree.nodes_.push_back(std::move(node));
    return index;
  };

  while (!stack.empty()) {
    const auto [dom_index, parent] = stack.back();
    stack.pop_back();
    const auto &el = doc.nodes[dom_index];
    const NodeId id = id_base + static_cast<NodeId>(dom_index);

    if (el.kind == html::NodeKind::Text) {
      auto text = collapse_whitespace(el.text);
      if (text.empty()) continue;
      AXNode node;
      node.id = id;
      node.role = Role::StaticText;
      node.name = std::move(text);
      emit(std::move(node), parent);
      continue;
    }
    if (el.kind != html::NodeKind::Element) continue;
    if (contains(kSkippedElements, el.tag) || is_hidden(el) || el.tag == "title") continue;

    AXNode node;
    node.id = id;
    bool leaf = false;
    const auto &tag = el.tag;
    if (tag == "a" && el.has_attr("href")) {
      node.role = Role::link;
      node.name = subtree_text(doc, dom_index);
      if (node.name.empty()) node.name = first_attr(el, {"aria-label", "title"});
      node.url = url::resolve(page_url, *el.attr("href"));
      leaf = true;
    } else if (tag == "input") {
      const auto type = lower(el.attr("type").value_or("text"));
      if (type == "text" || type == "search") {
        node.role = Role::textbox;
        node.name = first_attr(el, {"aria-label", "placeholder", "title"});
        node.attrs["required"] = python_bool(el.has_attr("required"));
        node.search_box = type == "search";
      } else if (type == "checkbox") {
        node.role = Role::checkbox;
        node.name = first_attr(el, {"aria-label", "title"});
        node.attrs["checked"] = el.has_attr("checked") ? "true" : "false";
      } else {
        node.role = Role::generic;
        node.name = first_attr(el, {"aria-label"});
      }
      leaf = true;
    } else if (tag == "button") {
      node.role = Role::button;
      node.name = subtree_text(doc, dom_index);
      if (node.name.empty()) node.name = first_attr(el, {"aria-label", "title"});
      leaf = true;
    } else if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') {
      node.role = Role::heading;
      node.name = subtree_text(doc, dom_index);
      leaf = true;
    } else if (tag == "img") {
      node.role = Role::image;
      node.name = first_attr(el, {"alt"});
      leaf = true;
    } else {
      node.role = Role::generic;
      node.name = first_attr(el, {"aria-label"});
    }

    std::size_t child_parent = parent;
    const bool transparent =
        node.role == Role::generic && node.name.empty() && contains(kInlineElements, tag);
    if (!transparent) child_parent = emit(std::move(node), parent);
    if (leaf) continue;
    for (auto it = el.children.rbegin(); it != el.children.rend(); ++it) {
      stack.push_back({*it, child_parent});
    }
  }

  tree.reindex();
  return tree;
}

AXTree merge_consecutive_text(const AXTree &tree) {
  AXTree out;
  out.id_span_ = tree.id_span_;
  out.diagnostics_ = tree.diagnostics_;
  if (tree.nodes_.empty()) return out;

  // Decide survivors first: for each parent, fold StaticText runs.
  std::unordered_map<NodeId, std::string> merged_names;
  std::unordered_map<NodeId, bool> dropped;
  std::unordered_map<NodeId, std::vector<NodeId>> new_children;
  for (const auto &node : tree.nodes_) {
    std::vector<NodeId> kids;
    NodeId run_head = 0;
    for (const auto child_id : node.children) {
      const auto *child = tree.find(child_id);
      if (child != nullptr && child->role == Role::StaticText) {
        if (run_head != 0) {
          auto &name = merged_names.try_emplace(run_head, tree.find(run_head)->name).first->second;
          name += " " + child->name;
          dropped[child_id] = true;
          continue;
        }
        run_head = child_id;
      } else {
        run_head = 0;
      }
      kids.push_back(child_id);
    }
    new_children.emplace(node.id, std::move(kids));
  }

  out.nodes_.reserve(tree.nodes_.size());
  for (const auto &node : tree.nodes_) {
    if (dropped.contains(node.id)) continue;
    AXNode copy = node;
    copy.children = std::move(new_children[node.id]);
    if (auto it = merged_names.find(node.id); it != merged_names.end()) copy.name = it->second;
    out.nodes_.push_back(std::move(copy));
  }
  out.reindex();
  return out;
}

std::string quote_name(std::string_view name) {
  const bool has_single = name.find('\'') != std::string_view::npos;
  const bool has_double = name.find('"') != std::string_view::npos;
  const char quote = has_single && !has_double ? '"' : '\'';
  std::string out(1, quote);
  for (const char c : name) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == quote) {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  out += quote;
  return out;
}

std::vector<std::string> render_lines(const AXTree &tree) {
  std::vector<std::string> lines;
  lines.reserve(tree.size());
  for (const auto &node : tree.nodes()) {
    if (node.role == Role::generic && node.name.empty()) continue;
    std::string name = node.name;
    if (node.role == Role::StaticText && name.size() > kMaxStaticTextChars) {
      name.resize(kMaxStaticTextChars);
      while (!name.empty() && (static_cast<unsigned char>(name.back()) & 0xC0) == 0x80) {
        name.pop_back();
      }
      if (!name.empty() && (static_cast<unsigned char>(name.back()) & 0x80) != 0) name.pop_back();
      name += "...";
    }
    std::string line = "[" + std::to_string(node.id) + "] ";
    line += to_string(node.role);
    line += " " + quote_name(name);
    switch (node.role) {
    case Role::link: line += " url: " + node.url.value_or(""); break;
    case Role::textbox: {
      const auto it = node.attrs.find("required");
      line += " required: " + (it == node.attrs.end() ? std::string("False") : it->second);
      break;
    }
    case Role::checkbox: {
      const auto it = node.attrs.find("checked");
      line += " checked: " + (it == node.attrs.end() ? std::string("false") : it->second);
      break;
    }
    default: break;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string render_observation(const AXTree &tree, const Viewport &viewport) {
  const auto lines = render_lines(tree);
  const auto total = lines.size();
  const auto begin = std::min(viewport.offset_lines, total);
  const auto end = std::min(total, begin + std::max<std::size_t>(viewport.height_lines, 1));
  std::string out;
  for (auto i = begin; i < end; ++i) {
    out += lines[i];
    out += '\n';
  }
  if (begin > 0 || end < total) {
    out += "(" + std::to_string(begin) + " lines above, " + std::to_string(total - end) +
           " lines below)\n";
  }
  return out;
}

bool scroll_down(Viewport &viewport, std::size_t total_lines) {
  if (viewport.offset_lines + viewport.height_lines >= total_lines) return false;
  viewport.offset_lines += viewport.height_lines;
  return true;
}

bool scroll_up(Viewport &viewport) {
  if (viewport.offset_lines == 0) return false;
  viewport.offset_lines -= std::min(viewport.offset_lines, viewport.height_lines);
  return true;
}

} // namespace browseragent
