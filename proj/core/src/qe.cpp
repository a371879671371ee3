#include "lexembed/qe.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "lexembed/errors.hpp"

namespace lexembed {

namespace {

// Projects var out of a single conjunct. An equation pinning var is used as
// a substitution; otherwise every (lower, upper) strict-bound pair combines
// into a var-free consequence, which over a dense unbounded order is exact.
std::optional<Conjunct> eliminate_from_conjunct(const Conjunct& c, int var) {
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    const Atom& a = c.atoms[i];
    if (a.rel != Rel::eq || a.term.coeff(var) == 0) continue;
    std::map<int, LinearTerm> sub{{var, a.term.solve_for(var)}};
    std::vector<Atom> rest;
    rest.reserve(c.atoms.size() - 1);
    for (std::size_t j = 0; j < c.atoms.size(); ++j) {
      if (j == i) continue;
      rest.push_back(Atom{c.atoms[j].term.substitute(sub), c.atoms[j].rel});
    }
    return normalize_conjunct(rest);
  }

  std::vector<Atom> rest, lowers, uppers;
  for (const Atom& a : c.atoms) {
    Rational q = a.term.coeff(var);
    if (q == 0) {
      rest.push_back(a);
    } else if (q < 0) {
      lowers.push_back(a);
    } else {
      uppers.push_back(a);
    }
  }
  if (lowers.empty() || uppers.empty()) {
    // var is unbounded on at least one side; the remaining atoms decide.
    return normalize_conjunct(rest);
  }
  for (const Atom& l : lowers) {
    for (const Atom& u : uppers) {
      LinearTerm t = u.term.coeff(var) * l.term - l.term.coeff(var) * u.term;
      rest.push_back(Atom{std::move(t), Rel::lt});
    }
  }
  return normalize_conjunct(rest);
}

std::set<int> conjunct_vars(const Conjunct& c) {
  std::set<int> vars;
  for (const Atom& a : c.atoms) {
    for (const auto& [v, q] : a.term.coeffs()) vars.insert(v);
  }
  return vars;
}

bool conjunct_satisfiable(const Conjunct& c) {
  Conjunct cur = c;
  while (true) {
    std::set<int> vars = conjunct_vars(cur);
    if (vars.empty()) return true;  // normalized and atom-free
    auto e = eliminate_from_conjunct(cur, *vars.begin());
    if (!e) return false;
    cur = std::move(*e);
  }
}

FormulaPtr qe_rec(const FormulaPtr& f, const QeOptions& opts) {
  switch (f->kind) {
    case Formula::Kind::atom:
      return f;
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      std::vector<FormulaPtr> parts;
      parts.reserve(f->children.size());
      for (const FormulaPtr& child : f->children) parts.push_back(qe_rec(child, opts));
      return f->kind == Formula::Kind::conj ? Formula::mk_and(std::move(parts))
                                            : Formula::mk_or(std::move(parts));
    }
    case Formula::Kind::neg:
      return Formula::mk_not(qe_rec(f->children[0], opts));
    case Formula::Kind::exists: {
      FormulaPtr body = qe_rec(f->children[0], opts);
      DnfFormula d = to_dnf(body, opts);
      return dnf_to_formula(eliminate_var(d, f->var, opts));
    }
    case Formula::Kind::forall:
      return Formula::mk_not(qe_rec(
          Formula::mk_exists(f->var, Formula::mk_not(f->children[0])), opts));
  }
  throw semantic_error("qe: unknown node");
}

// Bounds on v within cj after substituting already-assigned variables.
Rational choose_value(const Conjunct& cj, int v,
                      const std::map<int, Rational>& assign) {
  std::optional<Rational> lo, hi, pin;
  for (const Atom& a : cj.atoms) {
    Rational q = a.term.coeff(v);
    if (q == 0) continue;
    Rational rest = a.term.constant();
    for (const auto& [var, cf] : a.term.coeffs()) {
      if (var != v) rest += cf * assign.at(var);
    }
    Rational bound = -rest / q;
    if (a.rel == Rel::eq) {
      pin = bound;
    } else if (q > 0) {
      if (!hi || bound < *hi) hi = bound;
    } else {
      if (!lo || *lo < bound) lo = bound;
    }
  }
  if (pin) return *pin;
  if (lo && hi) return rat_midpoint(*lo, *hi);
  if (lo) return *lo + 1;
  if (hi) return *hi - 1;
  return 0;
}

}  // namespace

DnfFormula eliminate_var(const DnfFormula& d, int var, const QeOptions& opts) {
  DnfFormula out;
  std::size_t used = 0;
  for (const Conjunct& c : d.conjuncts) {
    auto e = eliminate_from_conjunct(c, var);
    if (!e) continue;
    used += e->atoms.size() + 1;
    if (used > opts.max_atoms) {
      throw qe_limit_error("atom budget exceeded while projecting a variable");
    }
    if (opts.semantic_prune && !conjunct_satisfiable(*e)) continue;
    out.conjuncts.push_back(std::move(*e));
  }
  std::sort(out.conjuncts.begin(), out.conjuncts.end());
  out.conjuncts.erase(std::unique(out.conjuncts.begin(), out.conjuncts.end()),
                      out.conjuncts.end());
  return out;
}

FormulaPtr qe(const FormulaPtr& f, const QeOptions& opts) {
  return qe_rec(alpha_normalize(f), opts);
}

SatResult is_satisfiable(const FormulaPtr& f, const QeOptions& opts) {
  FormulaPtr qf = qe(f, opts);
  std::set<int> fv = free_vars(qf);
  std::vector<int> vars(fv.begin(), fv.end());
  DnfFormula d = to_dnf(qf, opts);
  int maxv = vars.empty() ? 0 : vars.back();

  for (const Conjunct& c : d.conjuncts) {
    std::vector<Conjunct> stages;
    stages.reserve(vars.size());
    Conjunct cur = c;
    bool dead = false;
    for (int v : vars) {
      stages.push_back(cur);
      auto e = eliminate_from_conjunct(cur, v);
      if (!e) {
        dead = true;
        break;
      }
      cur = std::move(*e);
    }
    if (dead) continue;

    std::map<int, Rational> assign;
    for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i) {
      assign[vars[i]] = choose_value(stages[i], vars[i], assign);
    }
    SatResult r;
    r.sat = true;
    r.witness.assign(maxv, 0);
    for (const auto& [v, val] : assign) r.witness[v - 1] = val;
    return r;
  }
  return {};
}

FormulaPtr simplify_qf(const FormulaPtr& f, const QeOptions& opts) {
  return dnf_to_formula(to_dnf(f, opts));
}

}  // namespace lexembed
