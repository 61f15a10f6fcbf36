#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::xpath {

/// Static kind of an expression, as tracked by the query generator.
enum class ValueKind : std::uint8_t { kNodeSet, kNumber, kString, kBoolean, kSequence };

std::string_view kind_name(ValueKind k);

using KindMask = std::uint8_t;
constexpr KindMask mask(ValueKind k) { return static_cast<KindMask>(1u << static_cast<unsigned>(k)); }
inline constexpr KindMask kAnyKind = 0x1f;

/// One parameter slot: which kinds each standard accepts without a type
/// error, and whether 3.0 requires at most one item there.
struct ParamType {
  KindMask v1;
  KindMask v3;
  bool singleton_v3 = false;

  bool accepts(ValueKind k, Standard s) const { return ((s == Standard::kV1_0 ? v1 : v3) & mask(k)) != 0; }
};

enum class EntryForm : std::uint8_t { kFunction, kBinary, kUnary, kRange };

enum class ResultRule : std::uint8_t {
  kFixed,          // `result`
  kSameAsFirst,    // node-set stays node-set, anything else becomes a sequence
  kItemOfFirst,    // node-set stays node-set, anything else becomes a number
};

struct CatalogEntry {
  std::string_view name;
  EntryForm form;
  Function function;  // kFunction
  Operator op;        // kBinary / kUnary
  std::vector<ParamType> params;
  ResultRule rule;
  ValueKind result;
  Standard min_standard;
  /// Entries that config may switch off (has-children).
  bool optional = false;
};

/// Every function and operator a generated expression may contain.
std::span<const CatalogEntry> catalog();

const CatalogEntry& entry_for(Function fn);
const CatalogEntry& entry_for(Operator op);
const CatalogEntry& range_entry();
const CatalogEntry* find_entry(std::string_view name, EntryForm form);

/// Entries whose first parameter accepts `kind` and which exist in `standard`.
std::vector<const CatalogEntry*> functions_accepting(ValueKind kind, Standard standard);

/// Static result kind of `node`.
ValueKind infer_kind(const ExprNode& node, Standard standard);

/// True when `node` yields at most one item regardless of the document.
bool is_singleton(const ExprNode& node);

/// Catalog entry used by a Call/Binary/Unary/Range node; null for leaves.
const CatalogEntry* entry_of(const ExprNode& node);

}  // namespace xpathdiff::xpath
