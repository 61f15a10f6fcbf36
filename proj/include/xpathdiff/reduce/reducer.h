#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

#include "xpathdiff/harness/harness.h"

namespace xpathdiff::reduce {

/// Does the candidate still show the discrepancy being reduced?
using ReductionCheck = std::function<bool(const harness::TestCase&)>;

/// Input case does not satisfy the check, or lacks a structured query.
class ReductionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Same klass between the same two engines.
ReductionCheck same_discrepancy(harness::EngineSpec first, harness::EngineSpec second, harness::Klass klass);

struct ReduceStats {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  std::size_t passes = 0;
};

/// Node count + attributes + text contents + query AST nodes. Every accepted
/// step lowers it, or keeps it and shortens the case text.
std::size_t size_measure(const xml::XmlDocument& doc, const xpath::XPathExpr& expr);

/// Greedy first-improvement reduction to a fixpoint. Query steps: drop a
/// section (outer ones first), make an axis `child` or a `//` step `/`, drop a
/// predicate, replace an expression subtree by one of its children or a
/// literal of its kind. Document steps: keep only
/// the subtree of a non-root node, delete a non-root subtree, drop a non-id
/// attribute, drop text content. Ids are never renumbered.
harness::TestCase reduce(const harness::TestCase& input, const ReductionCheck& check, ReduceStats* stats = nullptr);

}  // namespace xpathdiff::reduce
