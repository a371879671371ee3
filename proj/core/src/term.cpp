#include "lexembed/term.hpp"

#include "lexembed/errors.hpp"

namespace lexembed {

LinearTerm LinearTerm::variable(int var, Rational coeff) {
  LinearTerm t;
  t.set_coeff(var, coeff);
  return t;
}

Rational LinearTerm::coeff(int var) const {
  auto it = coeffs_.find(var);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

void LinearTerm::set_coeff(int var, const Rational& value) {
  if (var < 1) throw semantic_error("variable index must be >= 1");
  if (value == 0)
    coeffs_.erase(var);
  else
    coeffs_[var] = value;
}

int LinearTerm::leading_var() const {
  return coeffs_.empty() ? 0 : coeffs_.begin()->first;
}

int LinearTerm::max_var() const {
  return coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
}

LinearTerm LinearTerm::operator-() const { return scaled(-1); }

LinearTerm LinearTerm::operator+(const LinearTerm& o) const {
  LinearTerm r = *this;
  r += o;
  return r;
}

LinearTerm& LinearTerm::operator+=(const LinearTerm& o) {
  constant_ += o.constant_;
  for (const auto& [v, c] : o.coeffs_) set_coeff(v, coeff(v) + c);
  return *this;
}

LinearTerm LinearTerm::operator-(const LinearTerm& o) const {
  return *this + (-o);
}

LinearTerm LinearTerm::scaled(const Rational& s) const {
  LinearTerm r;
  if (s == 0) return r;
  r.constant_ = constant_ * s;
  for (const auto& [v, c] : coeffs_) r.coeffs_[v] = c * s;
  return r;
}

bool LinearTerm::operator<(const LinearTerm& o) const {
  if (coeffs_ != o.coeffs_) return coeffs_ < o.coeffs_;
  return constant_ < o.constant_;
}

Rational LinearTerm::evaluate(const Point& p) const {
  Rational acc = constant_;
  for (const auto& [v, c] : coeffs_) {
    if (static_cast<std::size_t>(v) > p.size())
      throw semantic_error("point has no coordinate x" + std::to_string(v));
    acc += c * p[static_cast<std::size_t>(v) - 1];
  }
  return acc;
}

LinearTerm LinearTerm::substitute(const std::map<int, LinearTerm>& bindings) const {
  LinearTerm r{constant_};
  for (const auto& [v, c] : coeffs_) {
    auto it = bindings.find(v);
    if (it == bindings.end())
      r.set_coeff(v, r.coeff(v) + c);
    else
      r += it->second.scaled(c);
  }
  return r;
}

LinearTerm LinearTerm::solve_for(int var) const {
  Rational c = coeff(var);
  if (c == 0) throw semantic_error("solve_for: variable absent from term");
  LinearTerm rest = *this;
  rest.set_coeff(var, 0);
  return rest.scaled(Rational(-1) / c);
}

std::string term_string(const LinearTerm& t) {
  std::string s;
  for (const auto& [v, c] : t.coeffs()) {
    if (!s.empty()) s += " + ";
    if (c == 1)
      s += "x" + std::to_string(v);
    else
      s += rational_string(c) + "*x" + std::to_string(v);
  }
  if (s.empty()) return rational_string(t.constant());
  if (t.constant() != 0) s += " + " + rational_string(t.constant());
  return s;
}

}  // namespace lexembed
