#include "lexembed/embed1d.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <utility>

#include "lexembed/errors.hpp"
#include "lexembed/qe.hpp"

namespace lexembed {

namespace {

int fiber_band_count(const Cell& c, int base) {
  int n = 0;
  for (std::size_t i = static_cast<std::size_t>(base); i < c.coords.size();
       ++i) {
    if (c.coords[i].kind == CoordConstraint::Kind::band) ++n;
  }
  return n;
}

int fiber_band_level(const Cell& c, int base) {
  for (std::size_t i = static_cast<std::size_t>(base); i < c.coords.size();
       ++i) {
    if (c.coords[i].kind == CoordConstraint::Kind::band)
      return static_cast<int>(i) + 1;
  }
  throw pipeline_error("fiber_band_level: cell has no free coordinate");
}

// Fiber coordinates of a fully pinned cell as terms over the parameters.
std::vector<LinearTerm> point_chart(const Cell& c, int base) {
  std::map<int, LinearTerm> bind;
  std::vector<LinearTerm> out;
  for (std::size_t i = static_cast<std::size_t>(base); i < c.coords.size();
       ++i) {
    if (c.coords[i].kind != CoordConstraint::Kind::graph)
      throw semantic_error("point_chart: cell has a free coordinate");
    LinearTerm t = c.coords[i].eq->substitute(bind);
    bind[static_cast<int>(i) + 1] = t;
    out.push_back(std::move(t));
  }
  return out;
}

LinearTerm shift_vars(const LinearTerm& t, int delta) {
  std::map<int, LinearTerm> sub;
  for (const auto& [v, c] : t.coeffs()) {
    (void)c;
    sub[v] = LinearTerm::variable(v + delta);
  }
  return t.substitute(sub);
}

CoordConstraint shift_cc(const CoordConstraint& cc, int delta) {
  CoordConstraint out = cc;
  if (out.eq) *out.eq = shift_vars(*out.eq, delta);
  if (out.lo) *out.lo = shift_vars(*out.lo, delta);
  if (out.hi) *out.hi = shift_vars(*out.hi, delta);
  return out;
}

LinearTerm term_midpoint(const LinearTerm& a, const LinearTerm& b) {
  return (a + b).scaled(Rational(1, 2));
}

// One already-placed piece of the image: a cell of the working space
// together with the three output coordinates on it. c1 and c3 only mention
// parameters; mid may also mention the cell's free coordinate.
struct Part {
  Cell img;
  LinearTerm c1, mid, c3;
};

// Incremental construction of the embedding into M^3: keeps the placed
// parts plus the realized first/third coordinate values, and glues one
// interval or point at a time below, above, or into a cut of what is
// already placed.
class Attacher {
 public:
  Attacher(DefOrder o2, FormulaPtr region, QeOptions opts,
           std::vector<Part> parts = {}, std::vector<LinearTerm> v1 = {},
           std::vector<LinearTerm> v3 = {})
      : o2_(std::move(o2)),
        ctx_(region, opts),
        opts_(opts),
        b_(o2_.base),
        parts_(std::move(parts)),
        V1_(std::move(v1)),
        V3_(std::move(v3)) {}

  void attach(const Cell& img);
  void attach_labeled(const Cell& sub, ConditionLabel label);

  const std::vector<Part>& parts() const { return parts_; }
  const std::vector<LinearTerm>& v1() const { return V1_; }
  const std::vector<LinearTerm>& v3() const { return V3_; }

 private:
  DefOrder o2_;
  ParamCtx ctx_;
  QeOptions opts_;
  int b_;
  std::vector<Part> parts_;
  std::vector<LinearTerm> V1_, V3_;

  FormulaPtr D_formula() const;
  // Membership of the moved point block in one part / in the placed union.
  FormulaPtr img_at(const Cell& img, int ybase) const;
  FormulaPtr D_at(int ybase) const;
  // Output coordinate k of the current map, as "equals r" about the moved
  // point block.
  FormulaPtr g_eq(int k, int ybase, const LinearTerm& r) const;
  // Fiber coordinates of a cell with the free coordinate renamed to var v.
  std::vector<LinearTerm> cell_terms_at(const Cell& c, int v) const;
  void insert_value(std::vector<LinearTerm>& V, const LinearTerm& v);
  void attach_first(const Cell& img);
  void attach_succ_like(const Cell& sub, bool successor);
  void attach_point_succ_like(const Cell& sub, bool successor);
  void attach_cut(const Cell& sub);
  // Successor data shared by the interval and point variants.
  struct Neighbor {
    std::size_t part;
    std::vector<LinearTerm> F;  // neighbor fiber coordinates
    LinearTerm c1, mid, c3;     // map values at the neighbor
  };
  Neighbor resolve_neighbor(const Cell& ncell, int yb) const;
};

FormulaPtr Attacher::D_formula() const {
  std::vector<FormulaPtr> gs;
  gs.reserve(parts_.size());
  for (const Part& q : parts_) gs.push_back(cell_guard(q.img));
  return Formula::mk_or(std::move(gs));
}

FormulaPtr Attacher::img_at(const Cell& img, int ybase) const {
  return bind_block(cell_guard(img), b_, var_block(ybase, o2_.m));
}

FormulaPtr Attacher::D_at(int ybase) const {
  std::vector<FormulaPtr> gs;
  gs.reserve(parts_.size());
  for (const Part& q : parts_) gs.push_back(img_at(q.img, ybase));
  return Formula::mk_or(std::move(gs));
}

FormulaPtr Attacher::g_eq(int k, int ybase, const LinearTerm& r) const {
  std::vector<FormulaPtr> cases;
  cases.reserve(parts_.size());
  for (const Part& q : parts_) {
    LinearTerm val = (k == 1) ? q.c1 : (k == 3) ? q.c3 : q.mid;
    if (k == 2 && fiber_band_count(q.img, b_) == 1) {
      int lv = fiber_band_level(q.img, b_);
      val = val.substitute(
          {{lv, LinearTerm::variable(ybase + (lv - b_))}});
    }
    cases.push_back(
        Formula::mk_and({img_at(q.img, ybase), Formula::eq(val, r)}));
  }
  return Formula::mk_or(std::move(cases));
}

std::vector<LinearTerm> Attacher::cell_terms_at(const Cell& c, int v) const {
  if (fiber_band_count(c, b_) == 0) return point_chart(c, b_);
  Chart1 ch = chart_1d(c, b_);
  std::map<int, LinearTerm> sub{{ch.param_var, LinearTerm::variable(v)}};
  std::vector<LinearTerm> out;
  out.reserve(ch.coord.size());
  for (const LinearTerm& t : ch.coord) out.push_back(t.substitute(sub));
  return out;
}

void Attacher::insert_value(std::vector<LinearTerm>& V, const LinearTerm& v) {
  for (std::size_t i = 0; i < V.size(); ++i) {
    int s = ctx_.sign(v - V[i]);
    if (s == 0) return;
    if (s < 0) {
      V.insert(V.begin() + static_cast<std::ptrdiff_t>(i), v);
      return;
    }
  }
  V.push_back(v);
}

void Attacher::attach_first(const Cell& img) {
  Part p;
  p.img = img;
  p.c1 = LinearTerm(Rational(0));
  p.mid = fiber_band_count(img, b_) == 1
              ? LinearTerm::variable(fiber_band_level(img, b_))
              : LinearTerm(Rational(0));
  p.c3 = LinearTerm(Rational(0));
  parts_.push_back(std::move(p));
  insert_value(V1_, LinearTerm(Rational(0)));
  insert_value(V3_, LinearTerm(Rational(0)));
}

void Attacher::attach(const Cell& img) {
  if (parts_.empty()) {
    attach_first(img);
    return;
  }
  const int m = o2_.m;
  if (fiber_band_count(img, b_) == 1) {
    int lv = fiber_band_level(img, b_);
    for (const ConditionPiece& cp :
         condition_decompose(o2_, D_formula(), img, ctx_.region(), opts_)) {
      Cell sub = img;
      sub.coords[lv - 1] = cp.piece;
      sub.sample = cell_point(sub);
      attach_labeled(sub, cp.label);
    }
    return;
  }
  // single point: judge its placement against the placed union directly
  std::vector<LinearTerm> pt = point_chart(img, b_);
  std::vector<LinearTerm> Y = var_block(b_, m);
  std::vector<LinearTerm> Z = var_block(b_ + m, m);
  auto judge = [&](bool successor) {
    FormulaPtr xy = successor ? prec_terms(o2_, pt, Y) : prec_terms(o2_, Y, pt);
    FormulaPtr xz = successor ? prec_terms(o2_, pt, Z) : prec_terms(o2_, Z, pt);
    FormulaPtr zy = successor ? prec_terms(o2_, Z, Y) : prec_terms(o2_, Y, Z);
    FormulaPtr between =
        exists_block(Formula::mk_and({D_at(b_ + m), xz, zy}), b_ + m + 1, m);
    FormulaPtr body =
        Formula::mk_and({D_at(b_), xy, Formula::mk_not(between)});
    return ctx_.truth(qe(exists_block(body, b_ + 1, m), opts_));
  };
  ConditionLabel label = ConditionLabel::piii;
  if (judge(true)) {
    label = ConditionLabel::pi;
  } else if (judge(false)) {
    label = ConditionLabel::pii;
  }
  attach_labeled(img, label);
}

void Attacher::attach_labeled(const Cell& sub, ConditionLabel label) {
  switch (label) {
    case ConditionLabel::pi:
      attach_succ_like(sub, true);
      break;
    case ConditionLabel::pii:
      attach_succ_like(sub, false);
      break;
    case ConditionLabel::piii:
      attach_cut(sub);
      break;
  }
}

Attacher::Neighbor Attacher::resolve_neighbor(const Cell& ncell,
                                              int yb) const {
  Neighbor nb;
  nb.part = parts_.size();
  std::map<int, LinearTerm> bind;
  for (int k = yb; k < yb + o2_.m; ++k) {
    if (ncell.coords[static_cast<std::size_t>(k)].kind !=
        CoordConstraint::Kind::graph)
      throw pipeline_error("neighbor extraction failed");
    LinearTerm t =
        ncell.coords[static_cast<std::size_t>(k)].eq->substitute(bind);
    bind[k + 1] = t;
    nb.F.push_back(std::move(t));
  }
  return nb;
}

// Places a piece every point of which has an immediate neighbor on the
// given side inside the placed union, directly next to the neighbor's
// image in the lexicographic order.
void Attacher::attach_succ_like(const Cell& sub, bool successor) {
  const int b = b_;
  const int m = o2_.m;
  if (fiber_band_count(sub, b) == 0) {
    attach_point_succ_like(sub, successor);
    return;
  }
  const int L = fiber_band_level(sub, b);
  const int s = b + 1;   // scratch slot for the free coordinate
  const int yb = s;      // neighbor block: vars s+1 .. s+m
  const int zb = s + m;  // between block: vars s+m+1 .. s+2m

  std::vector<LinearTerm> chs = cell_terms_at(sub, s);
  std::vector<LinearTerm> Y = var_block(yb, m);
  std::vector<LinearTerm> Z = var_block(zb, m);
  FormulaPtr xy = successor ? prec_terms(o2_, chs, Y) : prec_terms(o2_, Y, chs);
  FormulaPtr xz = successor ? prec_terms(o2_, chs, Z) : prec_terms(o2_, Z, chs);
  FormulaPtr zy = successor ? prec_terms(o2_, Z, Y) : prec_terms(o2_, Y, Z);
  FormulaPtr between =
      exists_block(Formula::mk_and({D_at(zb), xz, zy}), zb + 1, m);
  FormulaPtr gamma = qe(
      Formula::mk_and({D_at(yb), xy, Formula::mk_not(between)}), opts_);

  std::vector<FormulaPtr> targets1;
  targets1.push_back(Formula::mk_and(
      {ctx_.region(), constraint_guard(sub.coords[L - 1], s)}));
  targets1.push_back(gamma);
  for (const Part& q : parts_) targets1.push_back(img_at(q.img, yb));
  CellDecomposition dec1 = decompose(targets1, yb + m, opts_);

  for (const Cell& tp : stack_pieces(dec1, b, 0)) {
    const Cell* ncell = nullptr;
    for (const Cell& c : dec1.cells) {
      if (!c.in(0) || !c.in(1)) continue;
      if (!std::equal(tp.coords.begin(), tp.coords.end(), c.coords.begin()))
        continue;
      if (ncell) throw pipeline_error("neighbor extraction failed");
      ncell = &c;
    }
    if (!ncell) throw pipeline_error("neighbor extraction failed");
    Neighbor nb = resolve_neighbor(*ncell, yb);
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (ncell->in(2 + i)) {
        if (nb.part != parts_.size())
          throw pipeline_error("neighbor extraction failed");
        nb.part = i;
      }
    }
    if (nb.part == parts_.size())
      throw pipeline_error("neighbor extraction failed");
    const Part& q = parts_[nb.part];
    nb.c1 = q.c1;
    nb.c3 = q.c3;
    nb.mid = q.mid;
    if (fiber_band_count(q.img, b) == 1) {
      int ql = fiber_band_level(q.img, b);
      nb.mid = nb.mid.substitute({{ql, nb.F[static_cast<std::size_t>(
                                        ql - b - 1)]}});
    }

    // elements of the placed union sharing the neighbor's first two output
    // coordinates strictly on our side of it
    std::vector<FormulaPtr> rhos;
    rhos.reserve(V3_.size());
    for (const LinearTerm& v : V3_) {
      FormulaPtr side =
          successor ? Formula::lt(v, nb.c3) : Formula::lt(nb.c3, v);
      FormulaPtr body =
          Formula::mk_and({D_at(yb), g_eq(1, yb, nb.c1), g_eq(2, yb, nb.mid),
                           g_eq(3, yb, v), side});
      rhos.push_back(qe(exists_block(body, yb + 1, m), opts_));
    }
    std::vector<FormulaPtr> targets2;
    targets2.push_back(Formula::mk_and(
        {ctx_.region(), constraint_guard(tp.coords[b], s)}));
    for (const FormulaPtr& r : rhos) targets2.push_back(r);
    CellDecomposition dec2 = decompose(targets2, s, opts_);
    for (const Cell& sp : stack_pieces(dec2, b, 0)) {
      std::optional<LinearTerm> extreme;
      for (std::size_t i = 0; i < V3_.size(); ++i) {
        if (!evaluate(rhos[i], sp.sample)) continue;
        if (successor || !extreme) extreme = V3_[i];
        if (!successor && extreme) break;
      }
      LinearTerm h;
      if (!extreme) {
        h = successor ? nb.c3 - LinearTerm(Rational(1))
                      : nb.c3 + LinearTerm(Rational(1));
      } else {
        h = term_midpoint(*extreme, nb.c3);
      }
      Part np;
      np.img = sub;
      np.img.coords[L - 1] = sp.coords[b];
      np.img.sample = cell_point(np.img);
      np.c1 = nb.c1;
      np.mid = nb.mid.substitute({{s, LinearTerm::variable(L)}});
      np.c3 = h;
      parts_.push_back(std::move(np));
      insert_value(V3_, h);
    }
  }
}

void Attacher::attach_point_succ_like(const Cell& sub, bool successor) {
  const int b = b_;
  const int m = o2_.m;
  const int yb = b;       // neighbor block: vars b+1 .. b+m
  const int zb = b + m;   // between block
  std::vector<LinearTerm> pt = point_chart(sub, b);
  std::vector<LinearTerm> Y = var_block(yb, m);
  std::vector<LinearTerm> Z = var_block(zb, m);
  FormulaPtr xy = successor ? prec_terms(o2_, pt, Y) : prec_terms(o2_, Y, pt);
  FormulaPtr xz = successor ? prec_terms(o2_, pt, Z) : prec_terms(o2_, Z, pt);
  FormulaPtr zy = successor ? prec_terms(o2_, Z, Y) : prec_terms(o2_, Y, Z);
  FormulaPtr between =
      exists_block(Formula::mk_and({D_at(zb), xz, zy}), zb + 1, m);
  FormulaPtr gamma = qe(
      Formula::mk_and({D_at(yb), xy, Formula::mk_not(between)}), opts_);

  std::vector<FormulaPtr> targets;
  targets.push_back(ctx_.region());
  targets.push_back(gamma);
  for (const Part& q : parts_) targets.push_back(img_at(q.img, yb));
  CellDecomposition dec = decompose(targets, yb + m, opts_);
  const Cell* ncell = nullptr;
  const Cell* firstLive = nullptr;
  for (const Cell& c : dec.cells) {
    if (!c.in(0)) continue;
    if (!firstLive) firstLive = &c;
    if (!std::equal(c.coords.begin(), c.coords.begin() + b,
                    firstLive->coords.begin()))
      throw NeedSplit{cell_prefix_guard(*firstLive, b)};
    if (!c.in(1)) continue;
    if (ncell) throw pipeline_error("neighbor extraction failed");
    ncell = &c;
  }
  if (!ncell) throw pipeline_error("neighbor extraction failed");
  Neighbor nb = resolve_neighbor(*ncell, yb);
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (ncell->in(2 + i)) {
      if (nb.part != parts_.size())
        throw pipeline_error("neighbor extraction failed");
      nb.part = i;
    }
  }
  if (nb.part == parts_.size())
    throw pipeline_error("neighbor extraction failed");
  const Part& q = parts_[nb.part];
  nb.c1 = q.c1;
  nb.c3 = q.c3;
  nb.mid = q.mid;
  if (fiber_band_count(q.img, b) == 1) {
    int ql = fiber_band_level(q.img, b);
    nb.mid =
        nb.mid.substitute({{ql, nb.F[static_cast<std::size_t>(ql - b - 1)]}});
  }
  std::optional<LinearTerm> extreme;
  for (const LinearTerm& v : V3_) {
    FormulaPtr side =
        successor ? Formula::lt(v, nb.c3) : Formula::lt(nb.c3, v);
    FormulaPtr body =
        Formula::mk_and({D_at(yb), g_eq(1, yb, nb.c1), g_eq(2, yb, nb.mid),
                         g_eq(3, yb, v), side});
    if (!ctx_.truth(qe(exists_block(body, yb + 1, m), opts_))) continue;
    if (successor || !extreme) extreme = v;
    if (!successor && extreme) break;
  }
  LinearTerm h;
  if (!extreme) {
    h = successor ? nb.c3 - LinearTerm(Rational(1))
                  : nb.c3 + LinearTerm(Rational(1));
  } else {
    h = term_midpoint(*extreme, nb.c3);
  }
  Part np;
  np.img = sub;
  np.c1 = nb.c1;
  np.mid = nb.mid;
  np.c3 = h;
  parts_.push_back(std::move(np));
  insert_value(V3_, h);
}

// Places a piece all of whose points sit in one and the same cut of the
// placed union: either at a fresh first coordinate strictly between the two
// sides, or, when one realized first coordinate straddles the cut, by
// subdividing the gap above it in thirds and shifting the straddler's upper
// half out of the way.
void Attacher::attach_cut(const Cell& sub) {
  const int b = b_;
  const int m = o2_.m;
  const bool hasBand = fiber_band_count(sub, b) == 1;
  const int L = hasBand ? fiber_band_level(sub, b) : 0;

  std::vector<LinearTerm> z0;
  if (hasBand) {
    const CoordConstraint& cc = sub.coords[L - 1];
    LinearTerm t0;
    if (cc.lo && cc.hi) {
      t0 = term_midpoint(*cc.lo, *cc.hi);
    } else if (cc.lo) {
      t0 = *cc.lo + LinearTerm(Rational(1));
    } else if (cc.hi) {
      t0 = *cc.hi - LinearTerm(Rational(1));
    } else {
      t0 = LinearTerm(Rational(0));
    }
    z0 = cell_terms_at(sub, b + 1);
    for (LinearTerm& t : z0) t = t.substitute({{b + 1, t0}});
  } else {
    z0 = point_chart(sub, b);
  }

  std::vector<LinearTerm> Y = var_block(b, m);
  std::vector<char> below(V1_.size()), above(V1_.size());
  for (std::size_t i = 0; i < V1_.size(); ++i) {
    FormulaPtr by = Formula::mk_and(
        {D_at(b), g_eq(1, b, V1_[i]), prec_terms(o2_, Y, z0)});
    below[i] = ctx_.truth(qe(exists_block(by, b + 1, m), opts_)) ? 1 : 0;
    FormulaPtr ab = Formula::mk_and(
        {D_at(b), g_eq(1, b, V1_[i]), prec_terms(o2_, z0, Y)});
    above[i] = ctx_.truth(qe(exists_block(ab, b + 1, m), opts_)) ? 1 : 0;
  }
  std::size_t shared = V1_.size();
  for (std::size_t i = 0; i < V1_.size(); ++i) {
    if (below[i] && above[i]) {
      if (shared != V1_.size())
        throw pipeline_error("cut straddles two first coordinates");
      shared = i;
    }
  }
  LinearTerm tvar =
      hasBand ? LinearTerm::variable(L) : LinearTerm(Rational(0));
  if (shared == V1_.size()) {
    // fresh first coordinate strictly between the two sides
    std::optional<LinearTerm> aL, aU;
    for (std::size_t i = 0; i < V1_.size(); ++i) {
      if (below[i]) aL = V1_[i];
    }
    for (std::size_t i = V1_.size(); i-- > 0;) {
      if (above[i]) aU = V1_[i];
    }
    LinearTerm a;
    if (aL && aU) {
      a = term_midpoint(*aL, *aU);
    } else if (aL) {
      a = *aL + LinearTerm(Rational(1));
    } else if (aU) {
      a = *aU - LinearTerm(Rational(1));
    } else {
      throw pipeline_error("cut with empty neighbor set");
    }
    insert_value(V1_, a);
    parts_.push_back(Part{sub, a, tvar, LinearTerm(Rational(0))});
    insert_value(V3_, LinearTerm(Rational(0)));
    return;
  }

  LinearTerm a0 = V1_[shared];
  std::optional<LinearTerm> cnext;
  if (shared + 1 < V1_.size()) cnext = V1_[shared + 1];
  LinearTerm d = cnext ? a0 + (*cnext - a0).scaled(Rational(1, 3))
                       : a0 + LinearTerm(Rational(1));
  LinearTerm e = cnext ? a0 + (*cnext - a0).scaled(Rational(2, 3))
                       : a0 + LinearTerm(Rational(2));
  std::vector<Part> np;
  np.reserve(parts_.size() + 1);
  for (const Part& q : parts_) {
    if (!ctx_.equal(q.c1, a0)) {
      np.push_back(q);
      continue;
    }
    std::vector<LinearTerm> qch = cell_terms_at(q.img, b + 1);
    FormulaPtr below_f = qe(prec_terms(o2_, qch, z0), opts_);
    if (fiber_band_count(q.img, b) == 0) {
      Part part = q;
      if (!ctx_.truth(below_f)) part.c1 = e;
      np.push_back(std::move(part));
      continue;
    }
    int ql = fiber_band_level(q.img, b);
    FormulaPtr qg = constraint_guard(q.img.coords[ql - 1], b + 1);
    CellDecomposition dq = decompose(
        {Formula::mk_and({ctx_.region(), qg}), below_f}, b + 1, opts_);
    for (const Cell& sp : stack_pieces(dq, b, 0)) {
      Part part = q;
      part.img.coords[ql - 1] = sp.coords[b];
      part.img.sample = cell_point(part.img);
      if (!evaluate(below_f, sp.sample)) part.c1 = e;
      np.push_back(std::move(part));
    }
  }
  parts_ = std::move(np);
  insert_value(V1_, d);
  insert_value(V1_, e);
  parts_.push_back(Part{sub, d, tvar, LinearTerm(Rational(0))});
  insert_value(V3_, LinearTerm(Rational(0)));
}

UniformPiece embed_one_region(const DefOrder& o, const FormulaPtr& W,
                              const QeOptions& opts) {
  const int b = o.base;
  Normalized1d nz = normalize_1d(o, W, opts);
  UniformPiece up;
  up.region = W;
  up.map.dom = b + o.m;
  up.map.cod = 3;
  if (nz.cells.empty()) return up;

  // order induced on the labeled cells through the piece isomorphisms
  std::vector<std::vector<LinearTerm>> inv_x, inv_y;
  for (std::size_t j = 0; j < nz.cells.size(); ++j) {
    const Cell& dc = nz.domain_cells[j];
    Rational sigma = nz.dirs[j] == Direction::increasing ? 1 : -1;
    if (fiber_band_count(dc, b) == 1) {
      Chart1 ch = chart_1d(dc, b);
      std::map<int, LinearTerm> sx{
          {ch.param_var, LinearTerm::variable(b + 2, sigma)}};
      std::map<int, LinearTerm> sy{
          {ch.param_var, LinearTerm::variable(b + 4, sigma)}};
      std::vector<LinearTerm> tx, ty;
      for (const LinearTerm& t : ch.coord) {
        tx.push_back(t.substitute(sx));
        ty.push_back(t.substitute(sy));
      }
      inv_x.push_back(std::move(tx));
      inv_y.push_back(std::move(ty));
    } else {
      std::vector<LinearTerm> pt = point_chart(dc, b);
      inv_x.push_back(pt);
      inv_y.push_back(pt);
    }
  }
  std::vector<FormulaPtr> p2s, pairs;
  for (std::size_t i = 0; i < nz.cells.size(); ++i) {
    p2s.push_back(cell_guard(nz.cells[i]));
    for (std::size_t j = 0; j < nz.cells.size(); ++j) {
      FormulaPtr gy =
          bind_block(cell_guard(nz.cells[j]), b, var_block(b + 2, 2));
      pairs.push_back(Formula::mk_and({cell_guard(nz.cells[i]), gy,
                                       prec_terms(o, inv_x[i], inv_y[j])}));
    }
  }
  DefOrder o2;
  o2.base = b;
  o2.m = 2;
  o2.P = Formula::mk_or(std::move(p2s));
  o2.prec = Formula::mk_or(std::move(pairs));
  o2.n = 1;

  Attacher at(o2, W, opts);
  for (const Cell& img : nz.cells) at.attach(img);

  PiecewiseMap nm;
  nm.dom = b + 2;
  nm.cod = 3;
  for (const Part& q : at.parts()) {
    Piece pc;
    pc.guard = Formula::mk_and({W, cell_guard(q.img)});
    pc.maps = {q.c1, q.mid, q.c3};
    nm.pieces.push_back(std::move(pc));
  }
  up.map = compose(nm, nz.iso, opts);
  up.v1 = at.v1();
  up.v3 = at.v3();
  return up;
}

}  // namespace

Normalized1d normalize_1d(const DefOrder& o, const FormulaPtr& region,
                          const QeOptions& opts) {
  const int b = o.base;
  FormulaPtr W = is_quantifier_free(region) ? region : qe(region, opts);
  CellDecomposition dec = decompose({o.P, W}, b + o.m, opts);
  std::vector<const Cell*> live;
  for (const Cell& c : dec.cells) {
    if (c.in(0) && c.in(1)) live.push_back(&c);
  }
  Normalized1d out;
  out.iso.dom = b + o.m;
  out.iso.cod = b + 2;
  if (live.empty()) return out;
  for (const Cell* c : live) {
    if (!std::equal(c->coords.begin(), c->coords.begin() + b,
                    live.front()->coords.begin()))
      throw NeedSplit{cell_prefix_guard(*live.front(), b)};
    if (fiber_band_count(*c, b) > 1)
      throw semantic_error("embed_1d: set is not one-dimensional");
  }
  struct NCell {
    Cell domain;
    Direction dir;
  };
  std::vector<NCell> ncells;
  for (const Cell* c : live) {
    if (fiber_band_count(*c, b) == 0) {
      ncells.push_back({*c, Direction::increasing});
      continue;
    }
    int lv = fiber_band_level(*c, b);
    for (const MonotonePiece& mp : classify_monotone(o, *c, W, opts)) {
      Cell sub = *c;
      sub.coords[lv - 1] = mp.piece;
      sub.sample = cell_point(sub);
      ncells.push_back({std::move(sub), mp.dir});
    }
  }
  std::vector<CoordConstraint> wprefix(live.front()->coords.begin(),
                                       live.front()->coords.begin() + b);
  for (std::size_t j = 0; j < ncells.size(); ++j) {
    const Cell& dc = ncells[j].domain;
    Direction dir = ncells[j].dir;
    Rational sigma = dir == Direction::increasing ? 1 : -1;
    LinearTerm label{Rational(static_cast<long>(j) + 1)};
    Cell img;
    img.coords = wprefix;
    CoordConstraint lab;
    lab.kind = CoordConstraint::Kind::graph;
    lab.eq = label;
    img.coords.push_back(lab);
    std::vector<CoordMap> rows;
    for (int i = 1; i <= b; ++i) {
      rows.emplace_back(LinearTerm::variable(i));
    }
    rows.emplace_back(label);
    CoordConstraint tcc;
    if (fiber_band_count(dc, b) == 1) {
      Chart1 ch = chart_1d(dc, b);
      rows.emplace_back(LinearTerm::variable(ch.band_level, sigma));
      tcc.kind = CoordConstraint::Kind::band;
      if (dir == Direction::increasing) {
        tcc.lo = ch.lo;
        tcc.hi = ch.hi;
      } else {
        if (ch.hi) tcc.lo = -*ch.hi;
        if (ch.lo) tcc.hi = -*ch.lo;
      }
    } else {
      rows.emplace_back(LinearTerm(Rational(0)));
      tcc.kind = CoordConstraint::Kind::graph;
      tcc.eq = LinearTerm(Rational(0));
    }
    img.coords.push_back(tcc);
    img.sample = cell_point(img);
    out.cells.push_back(std::move(img));
    out.domain_cells.push_back(dc);
    out.dirs.push_back(dir);
    Piece pc;
    pc.guard = Formula::mk_and({W, cell_guard(dc)});
    pc.maps = std::move(rows);
    out.iso.pieces.push_back(std::move(pc));
  }
  return out;
}

AttachResult attach_cell(const NiceSet& pp, const Cell& I,
                         ConditionLabel label, const DefOrder& combined,
                         const QeOptions& opts) {
  if (combined.base != 0 || combined.m != 4)
    throw semantic_error(
        "attach_cell: combined order must be over tagged 4-tuples");
  if (I.coords.size() != 4)
    throw semantic_error("attach_cell: I must be a tagged cell");
  FormulaPtr set = is_quantifier_free(pp.set) ? pp.set : qe(pp.set, opts);
  CellDecomposition dec = decompose({set}, 3, opts);
  std::vector<Part> parts;
  for (const Cell& c : dec.cells) {
    if (!c.in(0)) continue;
    if (c.coords[0].kind != CoordConstraint::Kind::graph ||
        c.coords[2].kind != CoordConstraint::Kind::graph ||
        !c.coords[0].eq->is_constant())
      throw semantic_error("attach_cell: set is not nice");
    Part q;
    CoordConstraint tag;
    tag.kind = CoordConstraint::Kind::graph;
    tag.eq = LinearTerm(Rational(0));
    q.img.coords.push_back(tag);
    for (int k = 0; k < 3; ++k) {
      q.img.coords.push_back(shift_cc(c.coords[static_cast<std::size_t>(k)],
                                      1));
    }
    q.img.sample = cell_point(q.img);
    q.c1 = *c.coords[0].eq;
    q.c3 = c.coords[2].eq->substitute({{1, q.c1}});
    if (c.coords[1].kind == CoordConstraint::Kind::band) {
      q.mid = LinearTerm::variable(3);
    } else {
      q.mid = c.coords[1].eq->substitute({{1, q.c1}});
    }
    if (!q.c3.is_constant())
      throw semantic_error("attach_cell: set is not nice");
    parts.push_back(std::move(q));
  }
  std::vector<LinearTerm> v1, v3;
  for (const Rational& r : pp.v1) v1.emplace_back(r);
  for (const Rational& r : pp.v3) v3.emplace_back(r);
  Attacher at(combined, Formula::mk_true(), opts, std::move(parts),
              std::move(v1), std::move(v3));
  at.attach_labeled(I, label);
  AttachResult res;
  res.g.dom = 4;
  res.g.cod = 3;
  for (const Part& q : at.parts()) {
    Piece pc;
    pc.guard = cell_guard(q.img);
    pc.maps = {q.c1, q.mid, q.c3};
    res.g.pieces.push_back(std::move(pc));
  }
  res.image.set = image_formula(res.g, opts);
  for (const LinearTerm& t : at.v1()) res.image.v1.push_back(t.evaluate({}));
  for (const LinearTerm& t : at.v3()) res.image.v3.push_back(t.evaluate({}));
  return res;
}

std::vector<UniformPiece> embed_1d_parametric(const DefOrder& o,
                                              const FormulaPtr& region,
                                              const QeOptions& opts) {
  std::deque<FormulaPtr> wl;
  FormulaPtr r0 = is_quantifier_free(region) ? region : qe(region, opts);
  if (is_satisfiable(r0, opts).sat) wl.push_back(r0);
  std::vector<UniformPiece> out;
  int splits = 0;
  while (!wl.empty()) {
    FormulaPtr W = wl.front();
    wl.pop_front();
    try {
      out.push_back(embed_one_region(o, W, opts));
    } catch (const NeedSplit& ns) {
      if (++splits > 200)
        throw pipeline_error("parameter refinement did not stabilize");
      FormulaPtr p = is_quantifier_free(ns.predicate)
                         ? ns.predicate
                         : qe(ns.predicate, opts);
      FormulaPtr w1 = simplify_qf(Formula::mk_and({W, p}), opts);
      FormulaPtr w2 =
          simplify_qf(Formula::mk_and({W, Formula::mk_not(p)}), opts);
      if (is_satisfiable(w1, opts).sat) wl.push_back(w1);
      if (is_satisfiable(w2, opts).sat) wl.push_back(w2);
    }
  }
  return out;
}

FlexEmbedding embed_1d(const DefOrder& o, const QeOptions& opts) {
  if (o.base != 0)
    throw semantic_error("embed_1d: use the parametric entry for base > 0");
  std::vector<UniformPiece> ups =
      embed_1d_parametric(o, Formula::mk_true(), opts);
  FlexEmbedding fe;
  fe.source = o;
  fe.map.dom = o.m;
  fe.map.cod = 3;
  fe.odd_values = {{}, {}};
  if (ups.empty()) return fe;
  if (ups.size() != 1)
    throw pipeline_error("unexpected split without parameters");
  fe.map = ups.front().map;
  for (const LinearTerm& t : ups.front().v1)
    fe.odd_values[0].push_back(t.evaluate({}));
  for (const LinearTerm& t : ups.front().v3)
    fe.odd_values[1].push_back(t.evaluate({}));
  return fe;
}

FlexEmbedding embed_1d_uniform(const Cell& base, const DefOrder& fiber_order,
                               const QeOptions& opts) {
  if (static_cast<int>(base.coords.size()) != fiber_order.base)
    throw semantic_error("embed_1d_uniform: base cell size mismatch");
  std::vector<UniformPiece> ups =
      embed_1d_parametric(fiber_order, cell_guard(base), opts);
  FlexEmbedding fe;
  fe.source = fiber_order;
  fe.map.dom = fiber_order.base + fiber_order.m;
  fe.map.cod = 3;
  fe.odd_values = {{}, {}};
  for (const UniformPiece& up : ups) {
    for (const Piece& pc : up.map.pieces) fe.map.pieces.push_back(pc);
  }
  bool constant = ups.size() == 1;
  if (constant) {
    for (const LinearTerm& t : ups.front().v1)
      constant = constant && t.is_constant();
    for (const LinearTerm& t : ups.front().v3)
      constant = constant && t.is_constant();
  }
  if (constant) {
    for (const LinearTerm& t : ups.front().v1)
      fe.odd_values[0].push_back(t.evaluate({}));
    for (const LinearTerm& t : ups.front().v3)
      fe.odd_values[1].push_back(t.evaluate({}));
  }
  return fe;
}

}  // namespace lexembed
