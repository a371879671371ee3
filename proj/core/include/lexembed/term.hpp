#pragma once

#include <map>
#include <optional>
#include <string>

#include "lexembed/rational.hpp"

namespace lexembed {

// Affine form c + sum q_i * x_i over positional variables x1, x2, ...
// Invariants: no stored coefficient is zero; variable indices are >= 1.
class LinearTerm {
 public:
  LinearTerm() = default;
  explicit LinearTerm(Rational constant) : constant_(std::move(constant)) {}

  static LinearTerm variable(int var, Rational coeff = 1);

  const std::map<int, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant() const { return constant_; }

  Rational coeff(int var) const;
  void set_coeff(int var, const Rational& value);
  bool is_constant() const { return coeffs_.empty(); }
  // Smallest variable index with a nonzero coefficient; 0 if constant.
  int leading_var() const;
  int max_var() const;

  LinearTerm operator-() const;
  LinearTerm operator+(const LinearTerm& o) const;
  LinearTerm operator-(const LinearTerm& o) const;
  LinearTerm scaled(const Rational& s) const;
  LinearTerm& operator+=(const LinearTerm& o);

  bool operator==(const LinearTerm& o) const {
    return constant_ == o.constant_ && coeffs_ == o.coeffs_;
  }
  bool operator<(const LinearTerm& o) const;

  // Requires every referenced variable to be assigned by p (1-based).
  Rational evaluate(const Point& p) const;

  // Simultaneous substitution var -> term.
  LinearTerm substitute(const std::map<int, LinearTerm>& bindings) const;

  // For coeff(var) != 0, the term b with "this = 0" equivalent to "x_var = b".
  LinearTerm solve_for(int var) const;

 private:
  std::map<int, Rational> coeffs_;
  Rational constant_ = 0;
};

inline LinearTerm operator*(const Rational& s, const LinearTerm& t) {
  return t.scaled(s);
}

std::string term_string(const LinearTerm& t);  // debugging form, not grammar

}  // namespace lexembed
