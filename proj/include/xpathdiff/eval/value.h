#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xpathdiff/xml/document.h"

namespace xpathdiff::eval {

enum class RefKind : std::uint8_t { kElement, kAttribute, kText };

/// Node item. Attribute and text nodes are addressed through their element.
struct NodeRef {
  xml::NodeId element;
  RefKind kind = RefKind::kElement;
  std::uint16_t attr = 0;  // index into the element's attributes
  bool operator==(const NodeRef&) const = default;
};

/// Atomized node content (xs:untypedAtomic).
struct Untyped {
  std::string value;
  bool operator==(const Untyped&) const = default;
};

/// Integers only occur under 3.0; 1.0 numbers are always doubles.
using Item = std::variant<NodeRef, double, std::int64_t, std::string, bool>;
using Atomic = std::variant<Untyped, double, std::int64_t, std::string, bool>;
using Value = std::vector<Item>;

enum class ErrorClass : std::uint8_t { kTypeError, kUnsupportedFeature, kDynamicError };

std::string_view error_class_name(ErrorClass c);
std::optional<ErrorClass> error_class_from_name(std::string_view name);

class EvalError : public std::runtime_error {
 public:
  EvalError(ErrorClass klass, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), klass_(klass), code_(std::move(code)) {}
  ErrorClass klass() const { return klass_; }
  const std::string& code() const { return code_; }

 private:
  ErrorClass klass_;
  std::string code_;
};

[[noreturn]] void type_error(const std::string& code, const std::string& message);
[[noreturn]] void dynamic_error(const std::string& code, const std::string& message);
[[noreturn]] void unsupported(const std::string& message);

/// Value or error, as returned at the evaluator boundary.
struct EvalResult {
  Value value;
  std::optional<EvalError> error;
  bool ok() const { return !error.has_value(); }
};

inline bool is_node(const Item& i) { return std::holds_alternative<NodeRef>(i); }
/// All items are nodes (an empty value counts as an empty node-set).
bool is_node_set(const Value& v);
/// Element ids of the node items, in value order.
std::vector<xml::NodeId> element_ids(const Value& v);

}  // namespace xpathdiff::eval
