#pragma once

#include <string>

#include "lexembed/formula.hpp"

namespace lexembed {

// Reads one formula in the s-expression grammar:
//   atoms        (< t1 t2), (= t1 t2); sugar: (<= ...), (> ...), (>= ...)
//   terms        x<k>, rational literals p or p/q, (+ t...), (- t1 t2), (* q t)
//   connectives  (and f...), (or f...), (not f), (exists x<k> f),
//                (forall x<k> f), true, false
// When y_base > 0, y<k> is also accepted and maps to variable y_base + k.
// Bound variables are renamed apart from free ones before returning.
// Throws parse_error with a byte offset on malformed input.
FormulaPtr parse_formula(const std::string& text, int y_base = 0);

// Canonical printer; parse_formula(print_formula(f)) is structurally f.
std::string print_formula(const FormulaPtr& f);
std::string print_term(const LinearTerm& t);

}  // namespace lexembed
