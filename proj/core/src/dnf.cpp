#include "lexembed/dnf.hpp"

#include <algorithm>
#include <map>

#include "lexembed/errors.hpp"

namespace lexembed {

namespace {

struct Budget {
  std::size_t cap;
  std::size_t used = 0;
  void add(std::size_t n) {
    used += n;
    if (used > cap) {
      throw qe_limit_error("atom budget exceeded while expanding to disjunctive form");
    }
  }
};

// Strict bounds and an optional pinned value for one variable part.
struct Bounds {
  std::optional<Rational> eq;
  std::optional<Rational> lo;  // variable part > lo
  std::optional<Rational> hi;  // variable part < hi
  bool contradictory = false;

  void pin(const Rational& v) {
    if (eq && *eq != v) contradictory = true;
    eq = v;
  }
  void raise(const Rational& v) {
    if (!lo || *lo < v) lo = v;
  }
  void lower(const Rational& v) {
    if (!hi || v < *hi) hi = v;
  }
};

void sort_unique(std::vector<Atom>& atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

void sort_unique(std::vector<Conjunct>& cs) {
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

std::vector<Conjunct> dnf_rec(const FormulaPtr& f, bool negated, Budget& b);

// Conjunction of two conjunct lists with per-pair tightening.
std::vector<Conjunct> product(const std::vector<Conjunct>& a,
                              const std::vector<Conjunct>& bs, Budget& b) {
  std::vector<Conjunct> out;
  for (const Conjunct& x : a) {
    for (const Conjunct& y : bs) {
      std::vector<Atom> merged = x.atoms;
      merged.insert(merged.end(), y.atoms.begin(), y.atoms.end());
      if (auto c = normalize_conjunct(merged)) {
        b.add(c->atoms.size() + 1);
        out.push_back(std::move(*c));
      }
    }
  }
  sort_unique(out);
  return out;
}

std::vector<Conjunct> dnf_rec(const FormulaPtr& f, bool negated, Budget& b) {
  switch (f->kind) {
    case Formula::Kind::atom: {
      const Atom& a = f->atom;
      std::vector<Conjunct> out;
      if (!negated) {
        out.push_back(Conjunct{{a}});
        b.add(1);
      } else if (a.rel == Rel::lt) {
        // not(t < 0) splits into (-t < 0) or (t = 0).
        if (auto c = normalize_conjunct({Atom{-a.term, Rel::lt}})) out.push_back(*c);
        if (auto c = normalize_conjunct({Atom{a.term, Rel::eq}})) out.push_back(*c);
        b.add(2);
      } else {
        // not(t = 0) splits into (t < 0) or (-t < 0).
        if (auto c = normalize_conjunct({Atom{a.term, Rel::lt}})) out.push_back(*c);
        if (auto c = normalize_conjunct({Atom{-a.term, Rel::lt}})) out.push_back(*c);
        b.add(2);
      }
      sort_unique(out);
      return out;
    }
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      bool conjunctive = (f->kind == Formula::Kind::conj) != negated;
      if (conjunctive) {
        std::vector<Conjunct> acc{Conjunct{}};
        for (const FormulaPtr& child : f->children) {
          acc = product(acc, dnf_rec(child, negated, b), b);
          if (acc.empty()) break;
        }
        return acc;
      }
      std::vector<Conjunct> acc;
      for (const FormulaPtr& child : f->children) {
        std::vector<Conjunct> cs = dnf_rec(child, negated, b);
        acc.insert(acc.end(), cs.begin(), cs.end());
        b.add(cs.size());
      }
      sort_unique(acc);
      return acc;
    }
    case Formula::Kind::neg:
      return dnf_rec(f->children[0], !negated, b);
    case Formula::Kind::exists:
    case Formula::Kind::forall:
      throw semantic_error("to_dnf: formula is not quantifier-free");
  }
  throw semantic_error("to_dnf: unknown node");
}

}  // namespace

std::optional<Conjunct> normalize_conjunct(const std::vector<Atom>& atoms) {
  // Key: the variable part scaled to leading coefficient +1.
  std::map<LinearTerm, Bounds> bounds;
  for (const Atom& a : atoms) {
    LinearTerm vp = a.term - LinearTerm(a.term.constant());
    const Rational& c0 = a.term.constant();
    if (vp.is_constant()) {
      bool holds = (a.rel == Rel::lt) ? c0 < 0 : c0 == 0;
      if (!holds) return std::nullopt;
      continue;
    }
    Rational lead = vp.coeff(vp.leading_var());
    LinearTerm key = vp.scaled(1 / lead);
    Rational bound = -c0 / lead;  // term rel 0 becomes key (rel') bound
    Bounds& bd = bounds[key];
    if (a.rel == Rel::eq) {
      bd.pin(bound);
    } else if (lead > 0) {
      bd.lower(bound);
    } else {
      bd.raise(bound);
    }
    if (bd.contradictory) return std::nullopt;
  }

  Conjunct out;
  for (const auto& [key, bd] : bounds) {
    if (bd.eq) {
      if (bd.lo && !(*bd.lo < *bd.eq)) return std::nullopt;
      if (bd.hi && !(*bd.eq < *bd.hi)) return std::nullopt;
      out.atoms.push_back(Atom{key - LinearTerm(*bd.eq), Rel::eq});
      continue;
    }
    if (bd.lo && bd.hi && !(*bd.lo < *bd.hi)) return std::nullopt;
    if (bd.lo) out.atoms.push_back(Atom{LinearTerm(*bd.lo) - key, Rel::lt});
    if (bd.hi) out.atoms.push_back(Atom{key - LinearTerm(*bd.hi), Rel::lt});
  }
  sort_unique(out.atoms);
  return out;
}

DnfFormula to_dnf(const FormulaPtr& f, const QeOptions& opts) {
  Budget b{opts.max_atoms};
  DnfFormula d;
  d.conjuncts = dnf_rec(f, false, b);
  return d;
}

FormulaPtr dnf_to_formula(const DnfFormula& d) {
  std::vector<FormulaPtr> parts;
  parts.reserve(d.conjuncts.size());
  for (const Conjunct& c : d.conjuncts) {
    std::vector<FormulaPtr> lits;
    lits.reserve(c.atoms.size());
    for (const Atom& a : c.atoms) lits.push_back(Formula::mk_atom(a.term, a.rel));
    parts.push_back(Formula::mk_and(std::move(lits)));
  }
  return Formula::mk_or(std::move(parts));
}

}  // namespace lexembed
