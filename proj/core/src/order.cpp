#include "lexembed/order.hpp"

#include <algorithm>

#include "lexembed/errors.hpp"

namespace lexembed {

FormulaPtr constraint_guard(const CoordConstraint& cc, int v) {
  return constraint_at_term(cc, LinearTerm::variable(v));
}

FormulaPtr constraint_at_term(const CoordConstraint& cc, const LinearTerm& t) {
  if (cc.kind == CoordConstraint::Kind::graph) return Formula::eq(t, *cc.eq);
  std::vector<FormulaPtr> ps;
  if (cc.lo) ps.push_back(Formula::lt(*cc.lo, t));
  if (cc.hi) ps.push_back(Formula::lt(t, *cc.hi));
  return Formula::mk_and(std::move(ps));
}

std::vector<Cell> stack_pieces(const CellDecomposition& dec, int base,
                               std::size_t w_idx) {
  std::vector<const Cell*> live;
  for (const Cell& c : dec.cells) {
    if (c.in(w_idx)) live.push_back(&c);
  }
  if (live.empty()) return {};
  const Cell* first = live.front();
  for (const Cell* c : live) {
    if (!std::equal(c->coords.begin(), c->coords.begin() + base,
                    first->coords.begin())) {
      throw NeedSplit{cell_prefix_guard(*first, base)};
    }
  }
  std::vector<Cell> out;
  for (const Cell* c : live) {
    if (out.empty() || !(out.back().coords[base] == c->coords[base])) {
      out.push_back(prefix_cell(*c, base + 1));
    }
  }
  return out;
}

FormulaPtr exists_block(FormulaPtr body, int first_var, int count) {
  for (int v = first_var + count - 1; v >= first_var; --v) {
    body = Formula::mk_exists(v, body);
  }
  return body;
}

int ParamCtx::sign(const LinearTerm& t) const {
  FormulaPtr neg = Formula::mk_atom(t, Rel::lt);
  FormulaPtr zero = Formula::mk_atom(t, Rel::eq);
  FormulaPtr pos = Formula::mk_atom(-t, Rel::lt);
  bool sn = is_satisfiable(Formula::mk_and({region_, neg}), opts_).sat;
  bool sz = is_satisfiable(Formula::mk_and({region_, zero}), opts_).sat;
  bool sp = is_satisfiable(Formula::mk_and({region_, pos}), opts_).sat;
  int hits = (sn ? 1 : 0) + (sz ? 1 : 0) + (sp ? 1 : 0);
  if (hits == 0) throw pipeline_error("empty parameter region");
  if (hits > 1) throw NeedSplit{sn ? neg : zero};
  return sn ? -1 : (sz ? 0 : 1);
}

bool ParamCtx::truth(const FormulaPtr& f) const {
  FormulaPtr qf = is_quantifier_free(f) ? f : qe(f, opts_);
  bool st = is_satisfiable(Formula::mk_and({region_, qf}), opts_).sat;
  bool sf = is_satisfiable(Formula::mk_and({region_, Formula::mk_not(qf)}), opts_).sat;
  if (!st && !sf) throw pipeline_error("empty parameter region");
  if (st && sf) throw NeedSplit{qf};
  return st;
}

std::vector<LinearTerm> var_block(int base, int k) {
  std::vector<LinearTerm> out;
  out.reserve(k);
  for (int i = 1; i <= k; ++i) out.push_back(LinearTerm::variable(base + i));
  return out;
}

FormulaPtr bind_block(const FormulaPtr& f, int base,
                      const std::vector<LinearTerm>& terms) {
  std::map<int, LinearTerm> b;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    b.emplace(base + 1 + static_cast<int>(i), terms[i]);
  }
  return substitute(f, b);
}

FormulaPtr prec_terms(const DefOrder& o, const std::vector<LinearTerm>& xs,
                      const std::vector<LinearTerm>& ys) {
  if (static_cast<int>(xs.size()) != o.m || static_cast<int>(ys.size()) != o.m) {
    throw semantic_error("prec_terms: block arity mismatch");
  }
  std::map<int, LinearTerm> b;
  for (int i = 0; i < o.m; ++i) {
    b.emplace(o.base + 1 + i, xs[i]);
    b.emplace(o.base + o.m + 1 + i, ys[i]);
  }
  return substitute(o.prec, b);
}

FormulaPtr prec_apply(const DefOrder& o, int xbase, int ybase) {
  return prec_terms(o, var_block(xbase, o.m), var_block(ybase, o.m));
}

FormulaPtr set_apply(const DefOrder& o, int xbase) {
  return bind_block(o.P, o.base, var_block(xbase, o.m));
}

DefOrder make_param_order(int base, int m, FormulaPtr P, FormulaPtr prec,
                          const QeOptions& opts) {
  DefOrder o;
  o.base = base;
  o.m = m;
  o.P = std::move(P);
  o.prec = std::move(prec);
  if (base == 0) {
    o.n = dimension(o.P, m, opts);
  } else {
    std::optional<int> best;
    for (const FiberPiece& p : parametric_fiber_dimension(o.P, base, m, opts)) {
      if (!best || p.fiber_dim > *best) best = p.fiber_dim;
    }
    o.n = best;
  }
  return o;
}

DefOrder make_def_order(int m, FormulaPtr P, FormulaPtr prec,
                        const QeOptions& opts) {
  return make_param_order(0, m, std::move(P), std::move(prec), opts);
}

std::optional<OrderViolation> check_linear_order(const DefOrder& o,
                                                 const QeOptions& opts) {
  const int b = o.base, m = o.m;
  FormulaPtr Px = o.P;
  FormulaPtr Py = bind_block(o.P, b, var_block(b + m, m));
  FormulaPtr Pz = bind_block(o.P, b, var_block(b + 2 * m, m));

  auto split = [&](const Point& w, int blocks, const char* axiom) {
    OrderViolation v;
    v.axiom = axiom;
    auto get = [&](int idx) {
      return idx <= static_cast<int>(w.size()) ? w[idx - 1] : Rational(0);
    };
    for (int i = 1; i <= b; ++i) v.params.push_back(get(i));
    for (int k = 0; k < blocks; ++k) {
      Point p;
      for (int i = 1; i <= m; ++i) p.push_back(get(b + k * m + i));
      v.points.push_back(std::move(p));
    }
    return v;
  };

  {
    auto X = var_block(b, m);
    SatResult r =
        is_satisfiable(Formula::mk_and({Px, prec_terms(o, X, X)}), opts);
    if (r.sat) return split(r.witness, 1, "irreflexivity");
  }
  {
    FormulaPtr f = Formula::mk_and(
        {Px, Py, Pz, prec_apply(o, b, b + m), prec_apply(o, b + m, b + 2 * m),
         Formula::mk_not(prec_apply(o, b, b + 2 * m))});
    SatResult r = is_satisfiable(f, opts);
    if (r.sat) return split(r.witness, 3, "transitivity");
  }
  {
    std::vector<FormulaPtr> eqs;
    for (int i = 1; i <= m; ++i) {
      eqs.push_back(Formula::eq(LinearTerm::variable(b + i),
                                LinearTerm::variable(b + m + i)));
    }
    FormulaPtr f = Formula::mk_and(
        {Px, Py, Formula::mk_not(prec_apply(o, b, b + m)),
         Formula::mk_not(prec_apply(o, b + m, b)),
         Formula::mk_not(Formula::mk_and(std::move(eqs)))});
    SatResult r = is_satisfiable(f, opts);
    if (r.sat) return split(r.witness, 2, "totality");
  }
  return std::nullopt;
}

FormulaPtr interval(const DefOrder& o) {
  const int b = o.base, m = o.m;
  FormulaPtr Pz = bind_block(o.P, b, var_block(b + 2 * m, m));
  return Formula::mk_and(
      {Pz, prec_apply(o, b, b + 2 * m), prec_apply(o, b + 2 * m, b + m)});
}

FormulaPtr compute_H(const DefOrder& o, const QeOptions& opts) {
  if (o.base != 0) throw semantic_error("compute_H: parameters not supported");
  if (!o.n || *o.n == 0) return o.P;  // empty or finite: nothing to exclude
  const int m = o.m, n = *o.n;

  std::vector<FormulaPtr> full;
  for (const FiberPiece& p :
       parametric_fiber_dimension(interval(o), 2 * m, m, opts)) {
    if (p.fiber_dim == n) full.push_back(p.base_guard);
  }
  // Dn(a, b) says dim of the interval (a, b) is n; reorient to (y at the
  // second block, x at the first) for the lower-interval quantifier.
  FormulaPtr Dn = Formula::mk_or(std::move(full));
  std::map<int, LinearTerm> swap;
  for (int i = 1; i <= m; ++i) {
    swap.emplace(i, LinearTerm::variable(m + i));
    swap.emplace(m + i, LinearTerm::variable(i));
  }
  FormulaPtr Dn_yx = substitute(Dn, swap);
  FormulaPtr Py = bind_block(o.P, 0, var_block(m, m));
  FormulaPtr bad = Formula::mk_and(
      {Py, prec_apply(o, m, 0), Formula::mk_not(Dn_yx)});
  bad = exists_block(std::move(bad), m + 1, m);
  return qe(Formula::mk_and({o.P, Formula::mk_not(bad)}), opts);
}

FormulaPtr compute_E(const DefOrder& o, const QeOptions& opts) {
  if (o.base != 0) throw semantic_error("compute_E: parameters not supported");
  if (!o.n || *o.n < 1) {
    throw semantic_error("compute_E: requires a set of positive dimension");
  }
  const int m = o.m, n = *o.n;
  FormulaPtr Pz = bind_block(o.P, 0, var_block(2 * m, m));
  FormulaPtr U = Formula::mk_and(
      {Pz, Formula::mk_or(
               {Formula::mk_and({prec_apply(o, 0, 2 * m), prec_apply(o, 2 * m, m)}),
                Formula::mk_and({prec_apply(o, m, 2 * m), prec_apply(o, 2 * m, 0)})})});
  std::vector<FormulaPtr> full;
  for (const FiberPiece& p : parametric_fiber_dimension(U, 2 * m, m, opts)) {
    if (p.fiber_dim == n) full.push_back(p.base_guard);
  }
  FormulaPtr Py = bind_block(o.P, 0, var_block(m, m));
  return Formula::mk_and(
      {o.P, Py, Formula::mk_not(Formula::mk_or(std::move(full)))});
}

std::vector<MonotonePiece> classify_monotone(const DefOrder& o, const Cell& C,
                                             const FormulaPtr& W,
                                             const QeOptions& opts) {
  const int b = o.base;
  if (static_cast<int>(C.coords.size()) != b + o.m) {
    throw semantic_error("classify_monotone: cell arity mismatch");
  }
  Chart1 ch = chart_1d(C, b);
  const int s = b + 1, t = b + 2;
  std::vector<LinearTerm> ch_t;
  ch_t.reserve(ch.coord.size());
  for (const LinearTerm& tm : ch.coord) {
    ch_t.push_back(tm.substitute({{s, LinearTerm::variable(t)}}));
  }
  FormulaPtr ordST = prec_terms(o, ch.coord, ch_t);
  FormulaPtr ordTS = prec_terms(o, ch_t, ch.coord);
  auto in_at = [&](int v) {
    std::vector<FormulaPtr> ps;
    if (ch.lo) ps.push_back(Formula::lt(*ch.lo, LinearTerm::variable(v)));
    if (ch.hi) ps.push_back(Formula::lt(LinearTerm::variable(v), *ch.hi));
    return Formula::mk_and(std::move(ps));
  };

  CellDecomposition dec =
      decompose({W, ordST, ordTS, in_at(s), in_at(t)}, b + 2, opts);
  std::vector<MonotonePiece> out;
  for (const Cell& pc : stack_pieces(dec, b, 0)) {
    Point wpart(pc.sample.begin(), pc.sample.begin() + b);
    const Rational& sv = pc.sample[b];
    if (ch.lo && !(ch.lo->evaluate(wpart) < sv)) continue;
    if (ch.hi && !(sv < ch.hi->evaluate(wpart))) continue;

    MonotonePiece mp;
    mp.piece = pc.coords[b];
    if (pc.coords[b].kind == CoordConstraint::Kind::band) {
      FormulaPtr Js = constraint_guard(pc.coords[b], s);
      FormulaPtr Jt = constraint_guard(pc.coords[b], t);
      FormulaPtr stlt =
          Formula::lt(LinearTerm::variable(s), LinearTerm::variable(t));
      bool incr_ok = !is_satisfiable(
          Formula::mk_and({W, Js, Jt, stlt, Formula::mk_not(ordST)}), opts).sat;
      if (incr_ok) {
        mp.dir = Direction::increasing;
      } else if (!is_satisfiable(
                     Formula::mk_and({W, Js, Jt, stlt, Formula::mk_not(ordTS)}),
                     opts).sat) {
        mp.dir = Direction::decreasing;
      } else {
        FormulaPtr viol =
            Formula::mk_and({Js, Jt, stlt, Formula::mk_not(ordST)});
        FormulaPtr S = qe(
            Formula::mk_not(Formula::mk_exists(s, Formula::mk_exists(t, viol))),
            opts);
        if (is_satisfiable(Formula::mk_and({W, S}), opts).sat) {
          throw NeedSplit{S};
        }
        throw semantic_error("accord violated");
      }
    }
    out.push_back(std::move(mp));
  }
  return out;
}

std::vector<ConditionPiece> condition_decompose(const DefOrder& o,
                                                const FormulaPtr& D,
                                                const Cell& I,
                                                const FormulaPtr& W,
                                                const QeOptions& opts) {
  const int b = o.base, m = o.m;
  if (static_cast<int>(I.coords.size()) != b + m) {
    throw semantic_error("condition_decompose: cell arity mismatch");
  }
  Chart1 ch = chart_1d(I, b);
  const int s = b + 1;
  auto in_at = [&](int v) {
    std::vector<FormulaPtr> ps;
    if (ch.lo) ps.push_back(Formula::lt(*ch.lo, LinearTerm::variable(v)));
    if (ch.hi) ps.push_back(Formula::lt(LinearTerm::variable(v), *ch.hi));
    return Formula::mk_and(std::move(ps));
  };

  // Immediate successor / predecessor in D with nothing of D or I between.
  auto Y = var_block(b + 1, m);       // b+2 .. b+m+1
  auto Z = var_block(b + m + 1, m);   // b+m+2 .. b+2m+1
  FormulaPtr Dy = bind_block(D, b, Y);
  FormulaPtr Dz = bind_block(D, b, Z);
  FormulaPtr Iz = bind_block(cell_guard(I), b, Z);
  auto no_between = [&](const std::vector<LinearTerm>& lo,
                        const std::vector<LinearTerm>& hi) {
    FormulaPtr mid = Formula::mk_and({Formula::mk_or({Dz, Iz}),
                                      prec_terms(o, lo, Z),
                                      prec_terms(o, Z, hi)});
    return Formula::mk_not(exists_block(std::move(mid), b + m + 2, m));
  };
  FormulaPtr c1 = qe(
      exists_block(Formula::mk_and({Dy, prec_terms(o, ch.coord, Y),
                                    no_between(ch.coord, Y)}),
                   b + 2, m),
      opts);
  FormulaPtr c2 = qe(
      exists_block(Formula::mk_and({Dy, prec_terms(o, Y, ch.coord),
                                    no_between(Y, ch.coord)}),
                   b + 2, m),
      opts);

  // Two chart points share the same prec-cut of D unless some member of D
  // separates them.
  const int s2 = b + 2;
  std::vector<LinearTerm> ch2;
  ch2.reserve(ch.coord.size());
  for (const LinearTerm& tm : ch.coord) {
    ch2.push_back(tm.substitute({{s, LinearTerm::variable(s2)}}));
  }
  auto Y2 = var_block(b + 2, m);  // b+3 .. b+m+2
  FormulaPtr Dy2 = bind_block(D, b, Y2);
  FormulaPtr y_lt_s = prec_terms(o, Y2, ch.coord);
  FormulaPtr y_lt_s2 = prec_terms(o, Y2, ch2);
  FormulaPtr sep = Formula::mk_or(
      {Formula::mk_and({y_lt_s, Formula::mk_not(y_lt_s2)}),
       Formula::mk_and({Formula::mk_not(y_lt_s), y_lt_s2})});
  FormulaPtr cutneq =
      qe(exists_block(Formula::mk_and({Dy2, sep}), b + 3, m), opts);

  // Points with no cut-constant neighborhood; these split the interval.
  const int av = b + 2, bv = b + 3, uv = b + 4, vv = b + 5;
  FormulaPtr cut_uv = substitute(
      cutneq, {{s, LinearTerm::variable(uv)}, {s2, LinearTerm::variable(vv)}});
  auto between = [&](int lo, int mid, int hi) {
    return Formula::mk_and({Formula::lt(LinearTerm::variable(lo),
                                        LinearTerm::variable(mid)),
                            Formula::lt(LinearTerm::variable(mid),
                                        LinearTerm::variable(hi))});
  };
  FormulaPtr inner = Formula::mk_exists(
      uv, Formula::mk_exists(
              vv, Formula::mk_and({between(av, uv, bv), between(av, vv, bv),
                                   cut_uv})));
  FormulaPtr psi = Formula::mk_exists(
      av, Formula::mk_exists(
              bv, Formula::mk_and({between(av, s, bv),
                                   Formula::mk_not(inner)})));
  FormulaPtr chi = qe(Formula::mk_and({Formula::mk_not(psi), in_at(s)}), opts);

  CellDecomposition dec = decompose({W, c1, c2, in_at(s), chi}, b + 1, opts);
  std::vector<ConditionPiece> out;
  for (const Cell& pc : stack_pieces(dec, b, 0)) {
    Point wpart(pc.sample.begin(), pc.sample.begin() + b);
    const Rational& sv = pc.sample[b];
    if (ch.lo && !(ch.lo->evaluate(wpart) < sv)) continue;
    if (ch.hi && !(sv < ch.hi->evaluate(wpart))) continue;

    ConditionPiece cp;
    cp.piece = pc.coords[b];
    if (evaluate(c1, pc.sample)) {
      cp.label = ConditionLabel::pi;
    } else if (evaluate(c2, pc.sample)) {
      cp.label = ConditionLabel::pii;
    } else {
      cp.label = ConditionLabel::piii;
      FormulaPtr check = Formula::mk_and({W, constraint_guard(cp.piece, s),
                                          constraint_guard(cp.piece, s2),
                                          cutneq});
      if (is_satisfiable(check, opts).sat) {
        throw pipeline_error("cut refinement did not stabilize");
      }
    }
    out.push_back(std::move(cp));
  }
  return out;
}

}  // namespace lexembed
