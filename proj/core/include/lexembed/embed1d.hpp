#pragma once

#include "lexembed/order.hpp"
#include "lexembed/piecewise.hpp"

namespace lexembed {

// Splitting of a one-dimensional ordered set into chart pieces on which the
// order agrees with < (after flipping decreasing pieces through negation),
// together with the definable isomorphism onto labeled cells {j} x J.
struct Normalized1d {
  PiecewiseMap iso;                // M^{base+m} -> M^{base+2}
  std::vector<Cell> cells;         // image cells, in label order 1, 2, ...
  std::vector<Cell> domain_cells;  // matching preimage subcells
  std::vector<Direction> dirs;     // direction of each preimage piece
};
// Requires fiber dimension <= 1 over the region. May throw NeedSplit when
// the piece structure varies across the parameter region (base > 0 only).
Normalized1d normalize_1d(const DefOrder& o, const FormulaPtr& region,
                          const QeOptions& opts = {});

// Glues one more interval (or point) onto an already-embedded nice subset
// of M^3. Domain convention for `combined` (m = 4): points are tagged
// tuples (tag, a, b, c) with tag = 0 for an element (a,b,c) of pp and
// tag = 1 for an element a of I (b = c = 0); combined.prec orders that
// union. I must be the tagged cell of the new interval, label its
// placement kind, and the order must agree with < on I.
struct AttachResult {
  PiecewiseMap g;  // M^4 -> M^3, identity on pp except finitely many
                   // first-coordinate shifts
  NiceSet image;
};
AttachResult attach_cell(const NiceSet& pp, const Cell& I,
                         ConditionLabel label, const DefOrder& combined,
                         const QeOptions& opts = {});

// Embedding of a set of dimension <= 1 into M^3 ordered lexicographically,
// with finite first and third coordinate projections.
FlexEmbedding embed_1d(const DefOrder& o, const QeOptions& opts = {});

// One parameter region with a uniform embedding over it: the map and the
// odd-coordinate value terms may mention the parameters x1..x_base.
struct UniformPiece {
  FormulaPtr region;
  PiecewiseMap map;  // M^{base+m} -> M^3
  std::vector<LinearTerm> v1, v3;  // odd values over the parameters, ascending
};
// Runs the embedding parametrically, splitting the region whenever a
// choice is not uniform, until every region admits one piecewise map.
std::vector<UniformPiece> embed_1d_parametric(const DefOrder& o,
                                              const FormulaPtr& region,
                                              const QeOptions& opts = {});

// Parametric embedding over one base cell, packaged as a single map.
FlexEmbedding embed_1d_uniform(const Cell& base, const DefOrder& fiber_order,
                               const QeOptions& opts = {});

}  // namespace lexembed
