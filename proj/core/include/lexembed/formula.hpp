#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "lexembed/term.hpp"

namespace lexembed {

enum class Rel { lt, eq };  // atoms are "term < 0" / "term = 0"

struct Atom {
  LinearTerm term;
  Rel rel = Rel::lt;
  bool operator==(const Atom& o) const { return rel == o.rel && term == o.term; }
  bool operator<(const Atom& o) const {
    if (rel != o.rel) return rel < o.rel;
    return term < o.term;
  }
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable first-order formula over the ordered vector space language.
// Conjunction/disjunction are n-ary; (and) is truth and (or) is falsity.
class Formula {
 public:
  enum class Kind { atom, conj, disj, neg, exists, forall };

  Kind kind;
  Atom atom;                        // kind == atom
  std::vector<FormulaPtr> children; // conj / disj / neg
  int var = 0;                      // exists / forall

  // Atoms are normalized: the leading coefficient has magnitude 1, equations
  // get a positive leading coefficient, and variable-free atoms fold.
  static FormulaPtr mk_atom(LinearTerm t, Rel rel);
  static FormulaPtr mk_true();
  static FormulaPtr mk_false();
  static FormulaPtr mk_and(std::vector<FormulaPtr> parts);
  static FormulaPtr mk_or(std::vector<FormulaPtr> parts);
  static FormulaPtr mk_not(FormulaPtr f);
  static FormulaPtr mk_exists(int var, FormulaPtr body);
  static FormulaPtr mk_forall(int var, FormulaPtr body);
  static FormulaPtr mk_quant(Kind k, int var, FormulaPtr body);

  // Convenience comparisons "a rel b" as normalized atoms.
  static FormulaPtr lt(const LinearTerm& a, const LinearTerm& b);
  static FormulaPtr eq(const LinearTerm& a, const LinearTerm& b);
  static FormulaPtr neq(const LinearTerm& a, const LinearTerm& b);

 private:
  explicit Formula(Kind k) : kind(k) {}
  friend FormulaPtr make_node(Kind);
};

bool is_true(const FormulaPtr& f);
bool is_false(const FormulaPtr& f);
bool is_quantifier_free(const FormulaPtr& f);
bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);

std::set<int> free_vars(const FormulaPtr& f);
// Largest variable index appearing anywhere (free or bound); 0 if none.
int max_var(const FormulaPtr& f);

// Truth of a quantifier-free formula at p. Throws semantic_error on a
// quantifier or on a variable that p does not assign.
bool evaluate(const FormulaPtr& f, const Point& p);

// Simultaneous capture-avoiding substitution of free variables.
// Throws semantic_error when a binding targets a bound variable.
FormulaPtr substitute(const FormulaPtr& f, const std::map<int, LinearTerm>& bindings);

// Renames bound variables to fresh indices above every other index in sight,
// making them pairwise distinct and distinct from all free variables.
FormulaPtr alpha_normalize(const FormulaPtr& f);

}  // namespace lexembed
