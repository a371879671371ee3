#pragma once

#include <optional>
#include <vector>

#include "lexembed/formula.hpp"

namespace lexembed {

struct QeOptions {
  // Cap on intermediate atom counts; exceeded caps throw qe_limit_error.
  std::size_t max_atoms = 50'000;
  // Drop conjuncts whose single-conjunct elimination chain refutes them.
  bool semantic_prune = true;
};

// Conjunction of atoms, sorted and deduplicated, with per-variable-part
// bound tightening applied. No atom is variable-free.
struct Conjunct {
  std::vector<Atom> atoms;
  bool operator==(const Conjunct& o) const { return atoms == o.atoms; }
  bool operator<(const Conjunct& o) const { return atoms < o.atoms; }
};

// Disjunction of conjuncts. No conjuncts means false; an atom-free conjunct
// means true.
struct DnfFormula {
  std::vector<Conjunct> conjuncts;
  bool is_false() const { return conjuncts.empty(); }
  bool is_true() const {
    return conjuncts.size() == 1 && conjuncts[0].atoms.empty();
  }
};

// Tightens bounds per variable part, detects trivial contradictions.
// nullopt means the conjunction is unsatisfiable on syntactic grounds.
std::optional<Conjunct> normalize_conjunct(const std::vector<Atom>& atoms);

// Negation normal form + distribution. Negated atoms split by density:
// not(t < 0) into (-t < 0) or (t = 0); not(t = 0) into (t < 0) or (-t < 0).
// Requires a quantifier-free input.
DnfFormula to_dnf(const FormulaPtr& f, const QeOptions& opts = {});

FormulaPtr dnf_to_formula(const DnfFormula& d);

}  // namespace lexembed
