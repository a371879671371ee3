#include "lexembed/rational.hpp"

#include <cctype>

#include "lexembed/errors.hpp"

namespace lexembed {

Rational parse_rational(const std::string& text, std::size_t position) {
  if (text.empty()) throw parse_error("empty rational literal", position);
  std::size_t i = text[0] == '-' || text[0] == '+' ? 1 : 0;
  if (i == text.size()) throw parse_error("malformed rational '" + text + "'", position);
  bool seen_slash = false;
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] == '/') {
      if (seen_slash || j + 1 == text.size() || j == i)
        throw parse_error("malformed rational '" + text + "'", position);
      seen_slash = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(text[j])))
      throw parse_error("malformed rational '" + text + "'", position);
  }
  Rational q;
  if (q.set_str(text, 10) != 0)
    throw parse_error("malformed rational '" + text + "'", position);
  if (seen_slash) {
    if (q.get_den() == 0)
      throw parse_error("zero denominator in '" + text + "'", position);
    q.canonicalize();
  }
  return q;
}

std::string rational_string(const Rational& q) { return q.get_str(); }

std::string point_string(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += rational_string(p[i]);
  }
  return s + ")";
}

}  // namespace lexembed
