#include "lexembed/formula.hpp"

#include <algorithm>

#include "lexembed/errors.hpp"

namespace lexembed {

FormulaPtr make_node(Formula::Kind k) {
  return std::shared_ptr<const Formula>(new Formula(k));
}

namespace {

FormulaPtr with_children(Formula::Kind k, std::vector<FormulaPtr> cs) {
  auto n = std::const_pointer_cast<Formula>(make_node(k));
  n->children = std::move(cs);
  return n;
}

}  // namespace

FormulaPtr Formula::mk_atom(LinearTerm t, Rel rel) {
  if (t.is_constant()) {
    bool truth = rel == Rel::lt ? t.constant() < 0 : t.constant() == 0;
    return truth ? mk_true() : mk_false();
  }
  Rational lead = t.coeff(t.leading_var());
  if (rel == Rel::eq) {
    t = t.scaled(1 / lead);  // positive leading coefficient, magnitude 1
  } else {
    t = t.scaled(1 / rat_abs(lead));  // keep sign, normalize magnitude
  }
  auto n = std::const_pointer_cast<Formula>(make_node(Kind::atom));
  n->atom = Atom{std::move(t), rel};
  return n;
}

FormulaPtr Formula::mk_true() { return with_children(Kind::conj, {}); }
FormulaPtr Formula::mk_false() { return with_children(Kind::disj, {}); }

FormulaPtr Formula::mk_and(std::vector<FormulaPtr> parts) {
  std::vector<FormulaPtr> out;
  for (auto& p : parts) {
    if (is_true(p)) continue;
    if (is_false(p)) return mk_false();
    if (p->kind == Kind::conj) {
      out.insert(out.end(), p->children.begin(), p->children.end());
    } else {
      out.push_back(std::move(p));
    }
  }
  if (out.size() == 1) return out[0];
  return with_children(Kind::conj, std::move(out));
}

FormulaPtr Formula::mk_or(std::vector<FormulaPtr> parts) {
  std::vector<FormulaPtr> out;
  for (auto& p : parts) {
    if (is_false(p)) continue;
    if (is_true(p)) return mk_true();
    if (p->kind == Kind::disj) {
      out.insert(out.end(), p->children.begin(), p->children.end());
    } else {
      out.push_back(std::move(p));
    }
  }
  if (out.size() == 1) return out[0];
  return with_children(Kind::disj, std::move(out));
}

FormulaPtr Formula::mk_not(FormulaPtr f) {
  if (is_true(f)) return mk_false();
  if (is_false(f)) return mk_true();
  if (f->kind == Kind::neg) return f->children[0];
  return with_children(Kind::neg, {std::move(f)});
}

FormulaPtr Formula::mk_quant(Kind k, int var, FormulaPtr body) {
  if (var < 1) throw semantic_error("quantified variable index must be >= 1");
  if (is_true(body) || is_false(body)) return body;
  if (!free_vars(body).count(var)) return body;
  auto n = std::const_pointer_cast<Formula>(make_node(k));
  n->var = var;
  n->children = {std::move(body)};
  return n;
}

FormulaPtr Formula::mk_exists(int var, FormulaPtr body) {
  return mk_quant(Kind::exists, var, std::move(body));
}

FormulaPtr Formula::mk_forall(int var, FormulaPtr body) {
  return mk_quant(Kind::forall, var, std::move(body));
}

FormulaPtr Formula::lt(const LinearTerm& a, const LinearTerm& b) {
  return mk_atom(a - b, Rel::lt);
}
FormulaPtr Formula::eq(const LinearTerm& a, const LinearTerm& b) {
  return mk_atom(a - b, Rel::eq);
}
FormulaPtr Formula::neq(const LinearTerm& a, const LinearTerm& b) {
  return mk_or({lt(a, b), lt(b, a)});
}

bool is_true(const FormulaPtr& f) {
  return f->kind == Formula::Kind::conj && f->children.empty();
}
bool is_false(const FormulaPtr& f) {
  return f->kind == Formula::Kind::disj && f->children.empty();
}

bool is_quantifier_free(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::exists || f->kind == Formula::Kind::forall)
    return false;
  return std::all_of(f->children.begin(), f->children.end(),
                     [](const FormulaPtr& c) { return is_quantifier_free(c); });
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->var != b->var) return false;
  if (a->kind == Formula::Kind::atom) return a->atom == b->atom;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!structurally_equal(a->children[i], b->children[i])) return false;
  return true;
}

namespace {

void free_vars_rec(const FormulaPtr& f, std::set<int>& bound, std::set<int>& out) {
  switch (f->kind) {
    case Formula::Kind::atom:
      for (const auto& [v, c] : f->atom.term.coeffs()) {
        (void)c;
        if (!bound.count(v)) out.insert(v);
      }
      break;
    case Formula::Kind::exists:
    case Formula::Kind::forall: {
      bool fresh = bound.insert(f->var).second;
      free_vars_rec(f->children[0], bound, out);
      if (fresh) bound.erase(f->var);
      break;
    }
    default:
      for (const auto& c : f->children) free_vars_rec(c, bound, out);
  }
}

}  // namespace

std::set<int> free_vars(const FormulaPtr& f) {
  std::set<int> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

int max_var(const FormulaPtr& f) {
  int m = 0;
  if (f->kind == Formula::Kind::atom) return f->atom.term.max_var();
  if (f->kind == Formula::Kind::exists || f->kind == Formula::Kind::forall)
    m = f->var;
  for (const auto& c : f->children) m = std::max(m, max_var(c));
  return m;
}

bool evaluate(const FormulaPtr& f, const Point& p) {
  switch (f->kind) {
    case Formula::Kind::atom: {
      Rational v = f->atom.term.evaluate(p);
      return f->atom.rel == Rel::lt ? v < 0 : v == 0;
    }
    case Formula::Kind::conj:
      for (const auto& c : f->children)
        if (!evaluate(c, p)) return false;
      return true;
    case Formula::Kind::disj:
      for (const auto& c : f->children)
        if (evaluate(c, p)) return true;
      return false;
    case Formula::Kind::neg:
      return !evaluate(f->children[0], p);
    default:
      throw semantic_error("evaluate: formula is not quantifier-free");
  }
}

namespace {

void collect_bound(const FormulaPtr& f, std::set<int>& out) {
  if (f->kind == Formula::Kind::exists || f->kind == Formula::Kind::forall)
    out.insert(f->var);
  for (const auto& c : f->children) collect_bound(c, out);
}

FormulaPtr subst_rec(const FormulaPtr& f, const std::map<int, LinearTerm>& b,
                     int& fresh) {
  switch (f->kind) {
    case Formula::Kind::atom:
      return Formula::mk_atom(f->atom.term.substitute(b), f->atom.rel);
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      std::vector<FormulaPtr> cs;
      cs.reserve(f->children.size());
      for (const auto& c : f->children) cs.push_back(subst_rec(c, b, fresh));
      return f->kind == Formula::Kind::conj ? Formula::mk_and(std::move(cs))
                                            : Formula::mk_or(std::move(cs));
    }
    case Formula::Kind::neg:
      return Formula::mk_not(subst_rec(f->children[0], b, fresh));
    default: {
      // Quantifier. Capture check: if any substituted term mentions this
      // bound variable, rename the binder first.
      int v = f->var;
      FormulaPtr body = f->children[0];
      bool captures = false;
      for (const auto& [src, term] : b) {
        (void)src;
        if (term.coeff(v) != 0) captures = true;
      }
      if (captures) {
        int nv = ++fresh;
        std::map<int, LinearTerm> rename{{v, LinearTerm::variable(nv)}};
        int scratch = fresh;
        body = subst_rec(body, rename, scratch);
        fresh = std::max(fresh, scratch);
        v = nv;
      }
      auto inner = b;
      inner.erase(v);
      return Formula::mk_quant(f->kind, v, subst_rec(body, inner, fresh));
    }
  }
}

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const std::map<int, LinearTerm>& bindings) {
  if (bindings.empty()) return f;
  std::set<int> bound;
  collect_bound(f, bound);
  int fresh = max_var(f);
  for (const auto& [v, t] : bindings) {
    if (bound.count(v))
      throw semantic_error("substitute: binding a bound variable x" +
                           std::to_string(v));
    fresh = std::max(fresh, t.max_var());
  }
  return subst_rec(f, bindings, fresh);
}

namespace {

FormulaPtr alpha_rec(const FormulaPtr& f, std::map<int, LinearTerm>& ren,
                     int& fresh) {
  switch (f->kind) {
    case Formula::Kind::atom:
      return Formula::mk_atom(f->atom.term.substitute(ren), f->atom.rel);
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      std::vector<FormulaPtr> cs;
      for (const auto& c : f->children) cs.push_back(alpha_rec(c, ren, fresh));
      return f->kind == Formula::Kind::conj ? Formula::mk_and(std::move(cs))
                                            : Formula::mk_or(std::move(cs));
    }
    case Formula::Kind::neg:
      return Formula::mk_not(alpha_rec(f->children[0], ren, fresh));
    default: {
      int nv = ++fresh;
      auto saved = ren.find(f->var);
      LinearTerm old;
      bool had = saved != ren.end();
      if (had) old = saved->second;
      ren[f->var] = LinearTerm::variable(nv);
      FormulaPtr body = alpha_rec(f->children[0], ren, fresh);
      if (had)
        ren[f->var] = old;
      else
        ren.erase(f->var);
      return Formula::mk_quant(f->kind, nv, std::move(body));
    }
  }
}

}  // namespace

FormulaPtr alpha_normalize(const FormulaPtr& f) {
  std::map<int, LinearTerm> ren;
  int fresh = max_var(f);
  return alpha_rec(f, ren, fresh);
}

}  // namespace lexembed
