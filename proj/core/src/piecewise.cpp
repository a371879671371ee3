#include "lexembed/piecewise.hpp"

#include "lexembed/errors.hpp"
#include "lexembed/qe.hpp"

namespace lexembed {

std::optional<Point> PiecewiseMap::try_evaluate(const Point& p) const {
  for (const Piece& pc : pieces) {
    if (!lexembed::evaluate(pc.guard, p)) continue;
    Point out;
    out.reserve(pc.maps.size());
    for (const CoordMap& cm : pc.maps) {
      if (const LinearTerm* t = std::get_if<LinearTerm>(&cm)) {
        out.push_back(t->evaluate(p));
        continue;
      }
      const RankCoord& rc = std::get<RankCoord>(cm);
      bool hit = false;
      for (const auto& [g, v] : rc.cases) {
        if (lexembed::evaluate(g, p)) {
          out.push_back(v);
          hit = true;
          break;
        }
      }
      if (!hit) throw semantic_error("piecewise map: rank cases do not cover the piece");
    }
    return out;
  }
  return std::nullopt;
}

Point PiecewiseMap::evaluate(const Point& p) const {
  if (auto out = try_evaluate(p)) return *out;
  throw semantic_error("piecewise map: point outside every guard");
}

FormulaPtr PiecewiseMap::domain_formula() const {
  std::vector<FormulaPtr> gs;
  gs.reserve(pieces.size());
  for (const Piece& pc : pieces) gs.push_back(pc.guard);
  return Formula::mk_or(std::move(gs));
}

PiecewiseMap identity_map(int m) {
  Piece p;
  p.guard = Formula::mk_true();
  for (int i = 1; i <= m; ++i) p.maps.emplace_back(LinearTerm::variable(i));
  PiecewiseMap pm;
  pm.dom = m;
  pm.cod = m;
  pm.pieces.push_back(std::move(p));
  return pm;
}

std::vector<std::pair<FormulaPtr, std::vector<LinearTerm>>> affine_cases(
    const Piece& p) {
  std::vector<std::pair<FormulaPtr, std::vector<LinearTerm>>> acc;
  acc.emplace_back(Formula::mk_true(), std::vector<LinearTerm>{});
  for (const CoordMap& cm : p.maps) {
    if (const LinearTerm* t = std::get_if<LinearTerm>(&cm)) {
      for (auto& [g, row] : acc) row.push_back(*t);
      continue;
    }
    const RankCoord& rc = std::get<RankCoord>(cm);
    std::vector<std::pair<FormulaPtr, std::vector<LinearTerm>>> next;
    for (const auto& [g, row] : acc) {
      for (const auto& [cg, v] : rc.cases) {
        auto row2 = row;
        row2.emplace_back(LinearTerm(v));
        next.emplace_back(Formula::mk_and({g, cg}), std::move(row2));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

PiecewiseMap compose(const PiecewiseMap& outer, const PiecewiseMap& inner,
                     const QeOptions& opts) {
  if (inner.cod != outer.dom) {
    throw semantic_error("compose: dimension mismatch");
  }
  PiecewiseMap out;
  out.dom = inner.dom;
  out.cod = outer.cod;
  for (const Piece& pi : inner.pieces) {
    for (const auto& [cg, row] : affine_cases(pi)) {
      std::map<int, LinearTerm> bind;
      for (std::size_t j = 0; j < row.size(); ++j) {
        bind.emplace(static_cast<int>(j) + 1, row[j]);
      }
      for (const Piece& po : outer.pieces) {
        Piece np;
        np.guard = Formula::mk_and({pi.guard, cg, substitute(po.guard, bind)});
        if (is_false(np.guard)) continue;
        if (!is_satisfiable(np.guard, opts).sat) continue;
        for (const CoordMap& cm : po.maps) {
          if (const LinearTerm* t = std::get_if<LinearTerm>(&cm)) {
            np.maps.emplace_back(t->substitute(bind));
            continue;
          }
          RankCoord rc;
          for (const auto& [g, v] : std::get<RankCoord>(cm).cases) {
            rc.cases.emplace_back(substitute(g, bind), v);
          }
          np.maps.emplace_back(std::move(rc));
        }
        out.pieces.push_back(std::move(np));
      }
    }
  }
  return out;
}

FormulaPtr image_formula(const PiecewiseMap& pm, const QeOptions& opts) {
  const int d = pm.dom, c = pm.cod;
  std::vector<FormulaPtr> parts;
  for (const Piece& pc : pm.pieces) {
    for (const auto& [cg, row] : affine_cases(pc)) {
      std::vector<FormulaPtr> conj{pc.guard, cg};
      for (int j = 0; j < c; ++j) {
        conj.push_back(Formula::eq(LinearTerm::variable(d + 1 + j), row[j]));
      }
      FormulaPtr f = Formula::mk_and(std::move(conj));
      for (int v = d; v >= 1; --v) f = Formula::mk_exists(v, f);
      parts.push_back(qe(f, opts));
    }
  }
  FormulaPtr img = Formula::mk_or(std::move(parts));
  std::map<int, LinearTerm> down;
  for (int j = 1; j <= c; ++j) {
    down.emplace(d + j, LinearTerm::variable(j));
  }
  return substitute(img, down);
}

}  // namespace lexembed
