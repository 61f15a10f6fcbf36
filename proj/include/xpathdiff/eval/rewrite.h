#pragma once

#include <optional>
#include <string_view>

#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::eval {

/// Deliberately unsound rewrites, used to build faulty engines that the
/// differential harness must catch.
enum class Mutation : std::uint8_t {
  /// `x * a op b` -> `x op (b div a)` for relational op, without flipping op
  /// when a is negative.
  kMulCompareRewrite,
  /// `x >= c1 or x <= c2` -> `true()` when [c1, inf) and (-inf, c2] cover the
  /// number line, ignoring that x may be empty or NaN.
  kOrTrueRewrite,
  /// `tail(subsequence(S, s, l))` -> `tail(subsequence(S, s, l - 1))`.
  kTailSubseqOffByOne,
};

std::string_view mutation_name(Mutation m);
std::optional<Mutation> mutation_from_name(std::string_view name);

/// Applies the rewrite everywhere it matches, bottom-up. Returns the number of
/// rewritten sites.
std::size_t apply_mutation(Mutation m, xpath::ExprNode& node);
xpath::XPathExpr apply_mutation(Mutation m, const xpath::XPathExpr& expr, std::size_t* sites = nullptr);

}  // namespace xpathdiff::eval
