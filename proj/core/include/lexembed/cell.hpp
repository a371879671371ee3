#pragma once

#include <optional>
#include <vector>

#include "lexembed/formula.hpp"
#include "lexembed/qe.hpp"

namespace lexembed {

// One coordinate of a cylindrical cell: either pinned to an affine function
// of the earlier coordinates (graph) or ranging strictly between two such
// functions (band), with absent bounds meaning unbounded.
struct CoordConstraint {
  enum class Kind { graph, band };
  Kind kind = Kind::band;
  std::optional<LinearTerm> eq;  // graph value
  std::optional<LinearTerm> lo;  // band lower bound
  std::optional<LinearTerm> hi;  // band upper bound

  bool operator==(const CoordConstraint& o) const {
    return kind == o.kind && eq == o.eq && lo == o.lo && hi == o.hi;
  }
  bool operator<(const CoordConstraint& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (eq != o.eq) return eq < o.eq;
    if (lo != o.lo) return lo < o.lo;
    return hi < o.hi;
  }
};

struct Cell {
  std::vector<CoordConstraint> coords;
  Point sample;              // canonical interior point, one value per coordinate
  std::vector<char> holds;   // truth of each requested set on this cell

  int dim() const;           // number of band coordinates
  bool in(std::size_t i = 0) const { return i < holds.size() && holds[i] != 0; }
};

// Partition of M^m into cylindrical cells, sign-invariant for every target.
struct CellDecomposition {
  int m = 0;
  std::vector<FormulaPtr> targets;
  std::vector<Cell> cells;
};

// Decomposition of M^m compatible with every set: on each cell each formula
// is constantly true or false (recorded in holds). Quantifiers are
// eliminated first. Boundary functions are collected per coordinate from the
// atoms, their pairwise differences seed the lower coordinates, and cells
// are lifted bottom-up by stacking graphs and bands.
CellDecomposition decompose(std::vector<FormulaPtr> sets, int m,
                            const QeOptions& opts = {});
CellDecomposition decompose(const FormulaPtr& set, int m,
                            const QeOptions& opts = {});

// Refinement whose prefix projections are pairwise equal or disjoint at
// every depth, found by adding prefix projections as compatibility targets
// until the predicate verifies (at most 10 rounds).
CellDecomposition good_projection(const CellDecomposition& dec,
                                  const QeOptions& opts = {});
bool good_projection_holds(const CellDecomposition& dec,
                           const QeOptions& opts = {});

FormulaPtr cell_guard(const Cell& c);
FormulaPtr cell_prefix_guard(const Cell& c, int k);  // first k coordinates
Cell prefix_cell(const Cell& c, int k);

// Canonical point: graph evaluates, bounded band takes the midpoint,
// half-bounded bands step one unit inside, the full line takes 0.
Point cell_point(const Cell& c);

// Max band count over the cells inside the set; nullopt when empty.
std::optional<int> dimension(const FormulaPtr& set, int m,
                             const QeOptions& opts = {});

// Base piece with constant fiber dimension for a family over
// x1..x_base (parameters) and the remaining fiber coordinates.
struct FiberPiece {
  Cell base;              // cell of M^base
  FormulaPtr base_guard;
  int fiber_dim = 0;
};
// Disjoint base pieces covering exactly the projection of the family onto
// the first base_vars coordinates, each with constant fiber dimension.
std::vector<FiberPiece> parametric_fiber_dimension(const FormulaPtr& family,
                                                   int base_vars,
                                                   int fiber_vars,
                                                   const QeOptions& opts = {});

// Affine parametrization of a cell whose coordinates past the first `base`
// ones contain exactly one band. The chart parameter reuses variable index
// base+1; every fiber coordinate resolves to a term over x1..x_base plus
// that parameter, and the band's bounds resolve to terms over x1..x_base.
struct Chart1 {
  int band_level = 0;  // 1-based index of the free coordinate
  int base = 0;
  int param_var = 0;   // = base + 1
  std::optional<LinearTerm> lo, hi;
  std::vector<LinearTerm> coord;  // coordinates base+1 .. m

  // Order on the cell induced by < on the chart parameter.
  LinearTerm forward() const { return LinearTerm::variable(band_level); }
};
Chart1 chart_1d(const Cell& c, int base = 0);

}  // namespace lexembed
