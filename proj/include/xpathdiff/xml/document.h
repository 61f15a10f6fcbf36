#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace xpathdiff::xml {

/// Identifier of an element node; equals the node's `id` attribute.
struct NodeId {
  std::uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

/// Stand-in for the document node. It is never stored in a document and never
/// appears in a result; it only serves as the context of a query's first step.
inline constexpr NodeId kDocumentOrigin{0};

/// Attribute or text payload: a signed 64-bit integer or a string.
using TypedValue = std::variant<std::int64_t, std::string>;

std::string lexical(const TypedValue& v);

struct Attribute {
  std::string name;
  TypedValue value;
  bool operator==(const Attribute&) const = default;
};

struct ElementNode {
  NodeId id;
  std::string tag;
  /// Generation order; the first entry is always `id`.
  std::vector<Attribute> attributes;
  std::optional<TypedValue> text;
  std::vector<NodeId> children;
  std::optional<NodeId> parent;

  const Attribute* find_attribute(std::string_view name) const;
  bool operator==(const ElementNode&) const = default;
};

enum class Axis : std::uint8_t {
  kSelf,
  kChild,
  kDescendant,
  kDescendantOrSelf,
  kParent,
  kAncestor,
  kAncestorOrSelf,
  kFollowing,
  kFollowingSibling,
  kPreceding,
  kPrecedingSibling,
};

inline constexpr std::array<Axis, 11> kAllAxes = {
    Axis::kSelf,           Axis::kChild,          Axis::kDescendant, Axis::kDescendantOrSelf,
    Axis::kParent,         Axis::kAncestor,       Axis::kAncestorOrSelf, Axis::kFollowing,
    Axis::kFollowingSibling, Axis::kPreceding,    Axis::kPrecedingSibling,
};

std::string_view axis_name(Axis axis);
std::optional<Axis> axis_from_name(std::string_view name);
/// Reverse axes deliver nodes nearest-first, i.e. in reverse document order.
bool is_reverse_axis(Axis axis);

/// Tree invariant violation while building a document.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable rooted, ordered element tree.
///
/// Nodes are stored in document order (pre-order). Besides the parent/children
/// links every node also gets a pre-order number, a subtree end and a depth;
/// the two reference evaluators deliberately navigate through different ones.
class XmlDocument {
 public:
  /// Sentinel order value for kDocumentOrigin.
  static constexpr std::int32_t kOriginOrder = -1;

  /// Builds a document from an unordered node table. Exactly one node must be
  /// parentless; links must be consistent and acyclic; ids unique and nonzero;
  /// every node's `id` attribute must come first and match its NodeId.
  explicit XmlDocument(std::vector<ElementNode> nodes);

  NodeId root() const { return nodes_.front().id; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(NodeId id) const { return index_.contains(id.value); }

  /// Throws std::out_of_range for an unknown id.
  const ElementNode& node(NodeId id) const { return nodes_[order_of(id)]; }
  std::uint32_t order_of(NodeId id) const;

  /// Node at pre-order position `order`.
  const ElementNode& at(std::uint32_t order) const { return nodes_[order]; }
  std::span<const ElementNode> nodes() const { return nodes_; }
  std::vector<NodeId> document_order() const;

  // Pointer-style links, by pre-order position.
  std::int32_t parent_order(std::uint32_t order) const { return parent_[order]; }
  std::span<const std::uint32_t> child_orders(std::uint32_t order) const { return children_[order]; }

  // Interval encoding: the subtree of `order` is [order, subtree_end(order)].
  std::uint32_t subtree_end(std::uint32_t order) const { return end_[order]; }
  std::uint32_t depth(std::uint32_t order) const { return depth_[order]; }

  /// Concatenated text of the node and its descendants.
  const std::string& string_value(std::uint32_t order) const { return string_values_[order]; }

  /// Distinct tags in first-occurrence document order.
  std::vector<std::string> tags() const;
  /// Distinct attribute names (including `id`) in first-occurrence order.
  std::vector<std::string> attribute_names() const;

  /// Structural equality: same nodes in the same order with the same
  /// attributes (order-sensitive), text, and links.
  bool operator==(const XmlDocument& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<ElementNode> nodes_;
  std::unordered_map<std::uint32_t, std::uint32_t> index_;
  std::vector<std::int32_t> parent_;
  std::vector<std::vector<std::uint32_t>> children_;
  std::vector<std::uint32_t> end_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::string> string_values_;
};

/// Nodes reachable from `context` over `axis`, in the axis's canonical order.
/// Only element nodes are returned; `context` may be kDocumentOrigin.
std::vector<NodeId> navigate_axis(const XmlDocument& doc, NodeId context, Axis axis);

/// Same as navigate_axis but by pre-order position (kOriginOrder for the
/// origin); appends to `out`.
void navigate_axis_orders(const XmlDocument& doc, std::int32_t context, Axis axis,
                          std::vector<std::uint32_t>& out);

/// Sorts into document order and drops duplicates.
std::vector<NodeId> document_order_dedup(const XmlDocument& doc, std::span<const NodeId> nodes);

}  // namespace xpathdiff::xml
