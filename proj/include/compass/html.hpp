#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace compass::html {

using NodeId = int;

struct Node {
  enum class Kind { Element, Text };

  Kind kind = Kind::Element;
  std::string tag;  // lowercase, elements only
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // entity-decoded, text nodes only
  NodeId parent = -1;
  std::vector<NodeId> children;

  bool is_element() const { return kind == Kind::Element; }
  std::optional<std::string_view> attr(std::string_view name) const;
};

/// Forgiving HTML tree. Handles comments, doctype, void and raw-text elements
/// (script, style, textarea, title), implicit paragraph/list-item closing, and
/// stray end tags. Node 0 is a synthetic "#document" element.
class Document {
 public:
  static Document parse(std::string_view html);

  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }

  /// Elements with the given tag in document order.
  std::vector<NodeId> elements_by_tag(std::string_view tag) const;
  /// Concatenated text of all descendant text nodes.
  std::string text_content(NodeId id) const;
  /// True if `id` or an ancestor is an element with the tag.
  bool inside(NodeId id, std::string_view tag) const;

 private:
  std::vector<Node> nodes_;
};

/// Decodes character references (named subset, decimal and hex).
std::string decode_entities(std::string_view s);

}  // namespace compass::html
