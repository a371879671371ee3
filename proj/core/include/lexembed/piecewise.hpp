#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "lexembed/formula.hpp"
#include "lexembed/order.hpp"

namespace lexembed {

// One output coordinate on one piece: an affine term (constants included) or
// a finite list of (guard, constant) cases covering the piece.
struct RankCoord {
  std::vector<std::pair<FormulaPtr, Rational>> cases;
};
using CoordMap = std::variant<LinearTerm, RankCoord>;

struct Piece {
  FormulaPtr guard;            // quantifier-free, over x1..x_dom
  std::vector<CoordMap> maps;  // one per output coordinate
};

// Piecewise-affine map with disjoint guards. Evaluation picks the first
// matching guard.
struct PiecewiseMap {
  int dom = 0;
  int cod = 0;
  std::vector<Piece> pieces;

  std::optional<Point> try_evaluate(const Point& p) const;
  Point evaluate(const Point& p) const;  // throws semantic_error off-domain
  FormulaPtr domain_formula() const;     // union of guards
};

PiecewiseMap identity_map(int m);

// Rank coordinates expanded into affine rows: (extra guard, affine row).
std::vector<std::pair<FormulaPtr, std::vector<LinearTerm>>> affine_cases(
    const Piece& p);

// outer after inner; unsatisfiable combined guards are dropped.
PiecewiseMap compose(const PiecewiseMap& outer, const PiecewiseMap& inner,
                     const QeOptions& opts = {});

// {y : exists x in a piece with y = f(x)} as a formula over x1..x_cod.
FormulaPtr image_formula(const PiecewiseMap& pm, const QeOptions& opts = {});

// Subset of M^3 with finite first and third coordinate projections.
struct NiceSet {
  FormulaPtr set;  // quantifier-free over x1..x3
  std::vector<Rational> v1;  // sorted values of coordinate 1
  std::vector<Rational> v3;  // sorted values of coordinate 3
};

// Order embedding into (M^{2n+1}, lex) whose odd output coordinates take
// finitely many values, listed per odd coordinate.
struct FlexEmbedding {
  PiecewiseMap map;
  std::vector<std::vector<Rational>> odd_values;  // coords 1, 3, 5, ...
  DefOrder source;
};

}  // namespace lexembed
