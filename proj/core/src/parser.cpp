#include "lexembed/parser.hpp"

#include <cctype>
#include <vector>

#include "lexembed/errors.hpp"

namespace lexembed {

namespace {

struct Token {
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      out.push_back({std::string(1, c), i});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) &&
           s[j] != '(' && s[j] != ')')
      ++j;
    out.push_back({s.substr(i, j - i), i});
    i = j;
  }
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, int y_base, std::size_t end)
      : toks_(std::move(toks)), y_base_(y_base), end_(end) {}

  FormulaPtr run() {
    FormulaPtr f = formula();
    if (pos_ != toks_.size())
      throw parse_error("trailing input after formula", peek().pos);
    return f;
  }

 private:
  const Token& peek() const {
    static Token eof;
    if (pos_ >= toks_.size()) {
      eof = {"<end of input>", end_};
      return eof;
    }
    return toks_[pos_];
  }

  Token next() {
    if (pos_ >= toks_.size())
      throw parse_error("unexpected end of input", end_);
    return toks_[pos_++];
  }

  void expect(const std::string& t) {
    Token tok = next();
    if (tok.text != t)
      throw parse_error("expected '" + t + "', found '" + tok.text + "'", tok.pos);
  }

  static bool is_number(const std::string& t) {
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    return i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]));
  }

  int variable_index(const Token& tok) const {
    const std::string& t = tok.text;
    if (t.size() < 2 || (t[0] != 'x' && t[0] != 'y'))
      throw parse_error("expected a variable, found '" + t + "'", tok.pos);
    for (std::size_t i = 1; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i])))
        throw parse_error("malformed variable '" + t + "'", tok.pos);
    int k = 0;
    try {
      k = std::stoi(t.substr(1));
    } catch (...) {
      throw parse_error("variable index out of range in '" + t + "'", tok.pos);
    }
    if (k < 1) throw parse_error("variable index must be >= 1 in '" + t + "'", tok.pos);
    if (t[0] == 'y') {
      if (y_base_ == 0)
        throw parse_error("unknown symbol '" + t + "' (y-variables not allowed here)", tok.pos);
      k += y_base_;
    }
    return k;
  }

  LinearTerm term() {
    Token tok = next();
    if (tok.text == "(") {
      Token op = next();
      if (op.text == "+") {
        LinearTerm acc;
        bool any = false;
        while (peek().text != ")") {
          acc += term();
          any = true;
        }
        if (!any) throw parse_error("(+ ...) needs at least one argument", op.pos);
        expect(")");
        return acc;
      }
      if (op.text == "-") {
        LinearTerm a = term();
        LinearTerm b = term();
        expect(")");
        return a - b;
      }
      if (op.text == "*") {
        Token q = next();
        if (!is_number(q.text))
          throw parse_error("(* q t) needs a rational literal first, found '" +
                                q.text + "'",
                            q.pos);
        Rational scale = parse_rational(q.text, q.pos);
        LinearTerm t = term();
        expect(")");
        return t.scaled(scale);
      }
      throw parse_error("unknown term operator '" + op.text + "'", op.pos);
    }
    if (tok.text == ")") throw parse_error("unexpected ')'", tok.pos);
    if (is_number(tok.text)) return LinearTerm{parse_rational(tok.text, tok.pos)};
    return LinearTerm::variable(variable_index(tok));
  }

  FormulaPtr formula() {
    Token tok = next();
    if (tok.text == "true") return Formula::mk_true();
    if (tok.text == "false") return Formula::mk_false();
    if (tok.text != "(")
      throw parse_error("expected '(', found '" + tok.text + "'", tok.pos);
    Token op = next();
    const std::string& o = op.text;
    if (o == "<" || o == "=" || o == "<=" || o == ">" || o == ">=") {
      LinearTerm a = term();
      LinearTerm b = term();
      expect(")");
      if (o == "<") return Formula::lt(a, b);
      if (o == "=") return Formula::eq(a, b);
      if (o == ">") return Formula::lt(b, a);
      if (o == "<=") return Formula::mk_or({Formula::lt(a, b), Formula::eq(a, b)});
      return Formula::mk_or({Formula::lt(b, a), Formula::eq(a, b)});
    }
    if (o == "and" || o == "or") {
      std::vector<FormulaPtr> parts;
      while (peek().text != ")") parts.push_back(formula());
      expect(")");
      return o == "and" ? Formula::mk_and(std::move(parts))
                        : Formula::mk_or(std::move(parts));
    }
    if (o == "not") {
      FormulaPtr f = formula();
      expect(")");
      return Formula::mk_not(std::move(f));
    }
    if (o == "exists" || o == "forall") {
      Token v = next();
      int var = variable_index(v);
      FormulaPtr body = formula();
      expect(")");
      return o == "exists" ? Formula::mk_exists(var, std::move(body))
                           : Formula::mk_forall(var, std::move(body));
    }
    throw parse_error("unknown operator '" + o + "'", op.pos);
  }

  std::vector<Token> toks_;
  int y_base_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, int y_base) {
  Parser p(tokenize(text), y_base, text.size());
  return alpha_normalize(p.run());
}

std::string print_term(const LinearTerm& t) {
  std::vector<std::string> parts;
  for (const auto& [v, c] : t.coeffs()) {
    if (c == 1)
      parts.push_back("x" + std::to_string(v));
    else
      parts.push_back("(* " + rational_string(c) + " x" + std::to_string(v) + ")");
  }
  if (parts.empty()) return rational_string(t.constant());
  if (t.constant() != 0) parts.push_back(rational_string(t.constant()));
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (const auto& p : parts) s += " " + p;
  return s + ")";
}

std::string print_formula(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::atom: {
      const char* op = f->atom.rel == Rel::lt ? "<" : "=";
      return std::string("(") + op + " " + print_term(f->atom.term) + " 0)";
    }
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      if (is_true(f)) return "true";
      if (is_false(f)) return "false";
      std::string s = f->kind == Formula::Kind::conj ? "(and" : "(or";
      for (const auto& c : f->children) s += " " + print_formula(c);
      return s + ")";
    }
    case Formula::Kind::neg:
      return "(not " + print_formula(f->children[0]) + ")";
    case Formula::Kind::exists:
    case Formula::Kind::forall: {
      std::string s = f->kind == Formula::Kind::exists ? "(exists x" : "(forall x";
      s += std::to_string(f->var) + " " + print_formula(f->children[0]) + ")";
      return s;
    }
  }
  return "";  // unreachable
}

}  // namespace lexembed
