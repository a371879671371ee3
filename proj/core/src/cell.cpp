#include "lexembed/cell.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lexembed/errors.hpp"

namespace lexembed {

namespace {

// Boundary pools: pools[lv] holds terms over x1..x_{lv-1} marking where
// coordinate lv crosses a collected boundary.
using Pools = std::vector<std::set<LinearTerm>>;

void seed_term(Pools& pools, const LinearTerm& t) {
  int lv = t.max_var();
  if (lv == 0) return;
  pools[lv].insert(t.solve_for(lv));
}

void collect_atoms(const FormulaPtr& f, Pools& pools) {
  switch (f->kind) {
    case Formula::Kind::atom:
      seed_term(pools, f->atom.term);
      return;
    case Formula::Kind::conj:
    case Formula::Kind::disj:
    case Formula::Kind::neg:
      for (const FormulaPtr& c : f->children) collect_atoms(c, pools);
      return;
    case Formula::Kind::exists:
    case Formula::Kind::forall:
      throw semantic_error("decompose: quantifier survived elimination");
  }
}

}  // namespace

int Cell::dim() const {
  int d = 0;
  for (const CoordConstraint& c : coords) {
    if (c.kind == CoordConstraint::Kind::band) ++d;
  }
  return d;
}

CellDecomposition decompose(std::vector<FormulaPtr> sets, int m,
                            const QeOptions& opts) {
  for (FormulaPtr& s : sets) {
    if (!is_quantifier_free(s)) s = qe(s, opts);
    std::set<int> fv = free_vars(s);
    if (!fv.empty() && *fv.rbegin() > m) {
      throw semantic_error("decompose: free variable beyond ambient dimension");
    }
  }

  Pools pools(static_cast<std::size_t>(m) + 1);
  for (const FormulaPtr& s : sets) collect_atoms(s, pools);

  // Relative order of two boundaries at a coordinate is decided lower down;
  // seeding the differences keeps it constant per base cell.
  for (int level = m; level >= 1; --level) {
    std::vector<LinearTerm> bs(pools[level].begin(), pools[level].end());
    for (std::size_t i = 0; i < bs.size(); ++i) {
      for (std::size_t j = i + 1; j < bs.size(); ++j) {
        LinearTerm d = bs[i] - bs[j];
        if (!d.is_constant()) seed_term(pools, d);
      }
    }
  }

  std::vector<Cell> cells{Cell{}};
  for (int level = 1; level <= m; ++level) {
    std::vector<Cell> next;
    for (const Cell& base : cells) {
      // Boundary order at the sample persists across the base cell.
      std::vector<std::pair<Rational, LinearTerm>> vals;
      vals.reserve(pools[level].size());
      for (const LinearTerm& b : pools[level]) {
        vals.emplace_back(b.evaluate(base.sample), b);
      }
      std::stable_sort(vals.begin(), vals.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<std::pair<Rational, LinearTerm>> uniq;
      for (auto& pv : vals) {
        if (uniq.empty() || uniq.back().first != pv.first) uniq.push_back(pv);
      }

      auto emit = [&](CoordConstraint cc, Rational coord) {
        Cell c = base;
        c.coords.push_back(std::move(cc));
        c.sample.push_back(std::move(coord));
        next.push_back(std::move(c));
      };
      const std::size_t k = uniq.size();
      {
        CoordConstraint cc;
        cc.kind = CoordConstraint::Kind::band;
        if (k > 0) cc.hi = uniq[0].second;
        emit(std::move(cc), k > 0 ? uniq[0].first - 1 : Rational(0));
      }
      for (std::size_t i = 0; i < k; ++i) {
        {
          CoordConstraint cc;
          cc.kind = CoordConstraint::Kind::graph;
          cc.eq = uniq[i].second;
          emit(std::move(cc), uniq[i].first);
        }
        CoordConstraint cc;
        cc.kind = CoordConstraint::Kind::band;
        cc.lo = uniq[i].second;
        if (i + 1 < k) {
          cc.hi = uniq[i + 1].second;
          emit(std::move(cc), rat_midpoint(uniq[i].first, uniq[i + 1].first));
        } else {
          emit(std::move(cc), uniq[i].first + 1);
        }
      }
    }
    cells = std::move(next);
  }

  for (Cell& c : cells) {
    c.holds.reserve(sets.size());
    for (const FormulaPtr& s : sets) {
      c.holds.push_back(evaluate(s, c.sample) ? 1 : 0);
    }
  }

  CellDecomposition dec;
  dec.m = m;
  dec.targets = std::move(sets);
  dec.cells = std::move(cells);
  return dec;
}

CellDecomposition decompose(const FormulaPtr& set, int m, const QeOptions& opts) {
  return decompose(std::vector<FormulaPtr>{set}, m, opts);
}

FormulaPtr cell_prefix_guard(const Cell& c, int k) {
  std::vector<FormulaPtr> parts;
  for (int i = 0; i < k && i < static_cast<int>(c.coords.size()); ++i) {
    const CoordConstraint& cc = c.coords[i];
    LinearTerm xv = LinearTerm::variable(i + 1);
    if (cc.kind == CoordConstraint::Kind::graph) {
      parts.push_back(Formula::eq(xv, *cc.eq));
    } else {
      if (cc.lo) parts.push_back(Formula::lt(*cc.lo, xv));
      if (cc.hi) parts.push_back(Formula::lt(xv, *cc.hi));
    }
  }
  return Formula::mk_and(std::move(parts));
}

FormulaPtr cell_guard(const Cell& c) {
  return cell_prefix_guard(c, static_cast<int>(c.coords.size()));
}

Cell prefix_cell(const Cell& c, int k) {
  Cell p;
  p.coords.assign(c.coords.begin(), c.coords.begin() + k);
  p.sample.assign(c.sample.begin(), c.sample.begin() + k);
  return p;
}

Point cell_point(const Cell& c) {
  Point p;
  p.reserve(c.coords.size());
  for (const CoordConstraint& cc : c.coords) {
    if (cc.kind == CoordConstraint::Kind::graph) {
      p.push_back(cc.eq->evaluate(p));
      continue;
    }
    if (cc.lo && cc.hi) {
      p.push_back(rat_midpoint(cc.lo->evaluate(p), cc.hi->evaluate(p)));
    } else if (cc.lo) {
      p.push_back(cc.lo->evaluate(p) + 1);
    } else if (cc.hi) {
      p.push_back(cc.hi->evaluate(p) - 1);
    } else {
      p.push_back(0);
    }
  }
  return p;
}

bool good_projection_holds(const CellDecomposition& dec, const QeOptions& opts) {
  for (int i = 1; i < dec.m; ++i) {
    for (std::size_t a = 0; a < dec.cells.size(); ++a) {
      for (std::size_t b = a + 1; b < dec.cells.size(); ++b) {
        bool same = std::equal(dec.cells[a].coords.begin(),
                               dec.cells[a].coords.begin() + i,
                               dec.cells[b].coords.begin());
        if (same) continue;
        FormulaPtr g1 = cell_prefix_guard(dec.cells[a], i);
        FormulaPtr g2 = cell_prefix_guard(dec.cells[b], i);
        if (!is_satisfiable(Formula::mk_and({g1, g2}), opts).sat) continue;
        if (is_satisfiable(Formula::mk_and({g1, Formula::mk_not(g2)}), opts).sat ||
            is_satisfiable(Formula::mk_and({g2, Formula::mk_not(g1)}), opts).sat) {
          return false;
        }
      }
    }
  }
  return true;
}

CellDecomposition good_projection(const CellDecomposition& dec,
                                  const QeOptions& opts) {
  CellDecomposition cur = dec;
  for (int round = 0; round < 10; ++round) {
    if (good_projection_holds(cur, opts)) return cur;
    std::vector<FormulaPtr> targets = cur.targets;
    for (const Cell& c : cur.cells) {
      FormulaPtr g = cell_guard(c);
      for (int i = 1; i < cur.m; ++i) {
        FormulaPtr proj = g;
        for (int v = cur.m; v > i; --v) proj = Formula::mk_exists(v, proj);
        targets.push_back(qe(proj, opts));
      }
    }
    cur = decompose(std::move(targets), cur.m, opts);
  }
  throw pipeline_error("good projection did not stabilize");
}

std::optional<int> dimension(const FormulaPtr& set, int m, const QeOptions& opts) {
  CellDecomposition dec = decompose(set, m, opts);
  std::optional<int> best;
  for (const Cell& c : dec.cells) {
    if (!c.in()) continue;
    int d = c.dim();
    if (!best || d > *best) best = d;
  }
  return best;
}

std::vector<FiberPiece> parametric_fiber_dimension(const FormulaPtr& family,
                                                   int base_vars, int fiber_vars,
                                                   const QeOptions& opts) {
  CellDecomposition dec = decompose(family, base_vars + fiber_vars, opts);
  std::map<std::vector<CoordConstraint>, std::pair<Cell, int>> pieces;
  for (const Cell& c : dec.cells) {
    if (!c.in()) continue;
    int fdim = 0;
    for (std::size_t i = base_vars; i < c.coords.size(); ++i) {
      if (c.coords[i].kind == CoordConstraint::Kind::band) ++fdim;
    }
    std::vector<CoordConstraint> key(c.coords.begin(), c.coords.begin() + base_vars);
    auto it = pieces.find(key);
    if (it == pieces.end()) {
      pieces.emplace(std::move(key),
                     std::make_pair(prefix_cell(c, base_vars), fdim));
    } else if (fdim > it->second.second) {
      it->second.second = fdim;
    }
  }
  std::vector<FiberPiece> out;
  out.reserve(pieces.size());
  for (auto& [key, val] : pieces) {
    FiberPiece fp;
    fp.base = std::move(val.first);
    fp.base_guard = cell_guard(fp.base);
    fp.fiber_dim = val.second;
    out.push_back(std::move(fp));
  }
  return out;
}

Chart1 chart_1d(const Cell& c, int base) {
  const int m = static_cast<int>(c.coords.size());
  if (base < 0 || base >= m) throw semantic_error("chart_1d: bad parameter prefix");
  int bands = 0;
  int band_level = 0;
  for (int i = base; i < m; ++i) {
    if (c.coords[i].kind == CoordConstraint::Kind::band) {
      ++bands;
      band_level = i + 1;
    }
  }
  if (bands != 1) throw semantic_error("chart_1d: cell is not one-dimensional");

  Chart1 ch;
  ch.band_level = band_level;
  ch.base = base;
  ch.param_var = base + 1;

  std::map<int, LinearTerm> bind;
  for (int i = base; i < m; ++i) {
    const CoordConstraint& cc = c.coords[i];
    LinearTerm t = (cc.kind == CoordConstraint::Kind::graph)
                       ? cc.eq->substitute(bind)
                       : LinearTerm::variable(ch.param_var);
    if (i + 1 == band_level) {
      if (cc.lo) ch.lo = cc.lo->substitute(bind);
      if (cc.hi) ch.hi = cc.hi->substitute(bind);
    }
    bind[i + 1] = t;
    ch.coord.push_back(std::move(t));
  }
  return ch;
}

}  // namespace lexembed
