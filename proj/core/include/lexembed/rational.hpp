#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace lexembed {

// Exact rational scalar. mpq_class keeps the canonical invariants we need:
// reduced fraction, positive denominator.
using Rational = mpq_class;

// Accepts "p", "-p", "p/q" with arbitrary-precision parts. Throws parse_error.
Rational parse_rational(const std::string& text, std::size_t position = 0);

std::string rational_string(const Rational& q);

inline int rat_sign(const Rational& q) { return sgn(q); }
inline Rational rat_abs(const Rational& q) { return abs(q); }
inline Rational rat_midpoint(const Rational& a, const Rational& b) {
  return (a + b) / 2;
}

// A point of M^k with exact coordinates; coordinate i of the space is p[i-1].
using Point = std::vector<Rational>;

std::string point_string(const Point& p);

}  // namespace lexembed
