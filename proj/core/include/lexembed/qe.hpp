#pragma once

#include "lexembed/dnf.hpp"

namespace lexembed {

struct SatResult {
  bool sat = false;
  // Assigns every free variable of the query; indices past the largest free
  // variable are absent, unconstrained ones are 0.
  Point witness;
};

// Existential projection: drops var from every conjunct, substituting a
// pinned value when an equation provides one and pairing strict bounds
// otherwise. Sound and complete over a dense unbounded order.
DnfFormula eliminate_var(const DnfFormula& d, int var, const QeOptions& opts = {});

// Equivalent quantifier-free formula, innermost quantifier first.
FormulaPtr qe(const FormulaPtr& f, const QeOptions& opts = {});

// Satisfiability with a concrete witness, found by eliminating free
// variables in ascending order and back-substituting.
SatResult is_satisfiable(const FormulaPtr& f, const QeOptions& opts = {});

// Normal-form cleanup of a quantifier-free formula.
FormulaPtr simplify_qf(const FormulaPtr& f, const QeOptions& opts = {});

}  // namespace lexembed
