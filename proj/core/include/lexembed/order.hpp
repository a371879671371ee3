#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexembed/cell.hpp"

namespace lexembed {

// A definable strict order on a definable set. Points live in coordinates
// base+1 .. base+m; coordinates 1..base are parameters shared by P and prec.
// prec's right argument block sits at base+m+1 .. base+2m.
struct DefOrder {
  int base = 0;
  int m = 0;
  FormulaPtr P;
  FormulaPtr prec;
  std::optional<int> n;  // dimension of P (max fiber dim when base > 0); nullopt = empty
};

DefOrder make_def_order(int m, FormulaPtr P, FormulaPtr prec,
                        const QeOptions& opts = {});
DefOrder make_param_order(int base, int m, FormulaPtr P, FormulaPtr prec,
                          const QeOptions& opts = {});

// x_{base+1} .. x_{base+k} as terms.
std::vector<LinearTerm> var_block(int base, int k);
// Simultaneously rebinds coordinates base+1 .. base+terms.size() of f.
FormulaPtr bind_block(const FormulaPtr& f, int base,
                      const std::vector<LinearTerm>& terms);

// prec with the argument blocks replaced by explicit terms / moved blocks.
FormulaPtr prec_terms(const DefOrder& o, const std::vector<LinearTerm>& xs,
                      const std::vector<LinearTerm>& ys);
FormulaPtr prec_apply(const DefOrder& o, int xbase, int ybase);
// P with its point block moved to xbase+1 .. xbase+m.
FormulaPtr set_apply(const DefOrder& o, int xbase);

// The constraint of one coordinate as a formula about variable v.
FormulaPtr constraint_guard(const CoordConstraint& cc, int v);
// Same constraint imposed on an arbitrary term.
FormulaPtr constraint_at_term(const CoordConstraint& cc, const LinearTerm& t);
// exists x_{first_var} .. x_{first_var+count-1} (body).
FormulaPtr exists_block(FormulaPtr body, int first_var, int count);
// Pieces of the coordinate base+1 (prefix cells of length base+1) of a
// decomposition, restricted to where target w_idx holds. Demands a single
// parameter prefix, else throws NeedSplit on the first one.
std::vector<Cell> stack_pieces(const CellDecomposition& dec, int base,
                               std::size_t w_idx);

struct OrderViolation {
  std::string axiom;  // "irreflexivity" | "transitivity" | "totality"
  Point params;               // parameter prefix of the witness
  std::vector<Point> points;  // offending tuple(s), each of length m
};

// Symbolic check that prec is a strict total order on P; nullopt when ok.
std::optional<OrderViolation> check_linear_order(const DefOrder& o,
                                                 const QeOptions& opts = {});

// {(a, b, z) : z in P, a prec z prec b} with a at base+1.., b at base+m+1..,
// z at base+2m+1... Pure substitution, no elimination.
FormulaPtr interval(const DefOrder& o);

// Points of P all of whose lower intervals have full dimension n.
// For n = 0 every interval is finite, so the set is P itself.
FormulaPtr compute_H(const DefOrder& o, const QeOptions& opts = {});

// xEy iff the open order-interval between x and y (either way) has
// dimension < n. Symmetric, reflexive on P. Requires n >= 1.
FormulaPtr compute_E(const DefOrder& o, const QeOptions& opts = {});

// Thrown when a queried property is not constant over the parameter region;
// the catcher splits the region along predicate and retries.
struct NeedSplit {
  FormulaPtr predicate;  // over the parameter prefix x1..x_base
};

// Comparison oracle over a parameter region. Every answer is uniform across
// the region; a mixed answer raises NeedSplit with a splitting predicate.
class ParamCtx {
 public:
  ParamCtx(FormulaPtr region, QeOptions opts = {})
      : region_(std::move(region)), opts_(std::move(opts)) {}

  const FormulaPtr& region() const { return region_; }
  const QeOptions& options() const { return opts_; }

  // Sign of a term over the region: -1, 0, or +1.
  int sign(const LinearTerm& t) const;
  bool less(const LinearTerm& a, const LinearTerm& b) const {
    return sign(a - b) < 0;
  }
  bool equal(const LinearTerm& a, const LinearTerm& b) const {
    return sign(a - b) == 0;
  }
  // Truth of a formula over the region's parameters.
  bool truth(const FormulaPtr& f) const;

 private:
  FormulaPtr region_;
  QeOptions opts_;
};

enum class Direction { increasing, decreasing };
enum class ConditionLabel { pi, pii, piii };

// Subinterval of the chart parameter of a one-dimensional cell. Bounds are
// terms over the parameter prefix; graph pieces are single points.
struct MonotonePiece {
  CoordConstraint piece;
  Direction dir = Direction::increasing;
};
struct ConditionPiece {
  CoordConstraint piece;
  ConditionLabel label = ConditionLabel::piii;
};

// Splits the chart image of C (a cell of M^{base+m} with one fiber band)
// into pieces on which prec agrees with < or with > uniformly over the
// parameter region. Throws NeedSplit when the answer varies with the
// parameters; throws semantic_error("accord violated") when prec is not
// monotone on a piece at a single parameter value.
std::vector<MonotonePiece> classify_monotone(const DefOrder& o, const Cell& C,
                                             const FormulaPtr& base_region,
                                             const QeOptions& opts = {});

// Splits the chart image of I into pieces where each point has an immediate
// prec-successor in D with nothing from D or I strictly between (PI), the
// mirror with predecessors (PII), or a single prec-cut of D shared by the
// whole piece (PIII). PI wins over PII wins over PIII. prec must agree with
// < on I (run classify_monotone and flip first).
std::vector<ConditionPiece> condition_decompose(const DefOrder& o,
                                                const FormulaPtr& D,
                                                const Cell& I,
                                                const FormulaPtr& base_region,
                                                const QeOptions& opts = {});

}  // namespace lexembed
