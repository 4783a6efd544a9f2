#include "exitmoment/expr/parser.hpp"

#include <cctype>

namespace exitmoment::expr {

ParseError::ParseError(int line, int column, const std::string& message)
    : Error("expr", "line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const int l = line;
    const int col = column;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      out.push_back({Tok::kNumber, std::string(s.substr(i, j - i)), l, col});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::kIdent, std::string(s.substr(i, j - i)), l, col});
      advance(j - i);
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::kPlus; break;
      case '-': kind = Tok::kMinus; break;
      case '*': kind = Tok::kStar; break;
      case '/': kind = Tok::kSlash; break;
      case '^': kind = Tok::kCaret; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      default:
        throw ParseError(l, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(1, c), l, col});
    advance(1);
  }
  out.push_back({Tok::kEnd, "", line, column});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names)
      : tokens_(tokenize(text)), names_(names) {}

  Expression parse() {
    if (peek().kind == Tok::kEnd) fail(peek(), "empty expression");
    Expression e = sum();
    if (peek().kind != Tok::kEnd) fail(peek(), "unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    throw ParseError(t.line, t.column, message);
  }
  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
    take();
  }
  std::size_t dim() const { return names_.size(); }

  Expression sum() {
    Expression e = product();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const bool minus = take().kind == Tok::kMinus;
      Expression rhs = product();
      if (minus) {
        e -= rhs;
      } else {
        e += rhs;
      }
    }
    return e;
  }

  Expression product() {
    Expression e = unary();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      const bool divide = take().kind == Tok::kSlash;
      const Token& at = peek();
      Expression rhs = unary();
      if (divide) {
        if (!rhs.is_constant() || rhs.is_zero()) {
          fail(at, "division is only supported by a nonzero constant");
        }
        e *= Rational(1) / rhs.poly().terms().begin()->second;
      } else {
        e *= rhs;
      }
    }
    return e;
  }

  Expression unary() {
    if (peek().kind == Tok::kMinus) {
      take();
      return -unary();
    }
    if (peek().kind == Tok::kPlus) {
      take();
      return unary();
    }
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (peek().kind == Tok::kCaret) {
      take();
      const Token& t = peek();
      if (t.kind != Tok::kNumber || t.text.find_first_not_of("0123456789") != std::string::npos) {
        fail(t, "exponent must be a non-negative integer literal");
      }
      take();
      if (t.text.size() > 3) fail(t, "exponent too large");
      base = base.pow(static_cast<unsigned>(std::stoul(t.text)));
      if (peek().kind == Tok::kCaret) fail(peek(), "chained exponents are ambiguous; use parentheses");
    }
    return base;
  }

  Expression primary() {
    const Token& t = take();
    switch (t.kind) {
      case Tok::kNumber:
        try {
          return Expression::constant(dim(), parse_rational(t.text));
        } catch (const Error&) {
          fail(t, "malformed number '" + t.text + "'");
        }
      case Tok::kLParen: {
        Expression e = sum();
        expect(Tok::kRParen, "')'");
        return e;
      }
      case Tok::kIdent: {
        if ((t.text == "sin" || t.text == "cos") && peek().kind == Tok::kLParen) {
          take();
          const Token& arg_start = peek();
          Expression arg = sum();
          expect(Tok::kRParen, "')'");
          return trig(t.text == "sin", arg, arg_start);
        }
        for (std::size_t i = 0; i < names_.size(); ++i) {
          if (names_[i] == t.text) return Expression::variable(dim(), i);
        }
        if (peek().kind == Tok::kLParen) fail(t, "unsupported function '" + t.text + "'");
        fail(t, "undeclared variable '" + t.text + "'");
      }
      case Tok::kEnd:
        fail(t, "unexpected end of expression");
      default:
        fail(t, "unexpected '" + t.text + "'");
    }
  }

  Expression trig(bool is_sine, const Expression& arg, const Token& at) {
    if (!arg.is_polynomial()) fail(at, "nested trigonometric functions are not supported");
    const Polynomial p = arg.as_polynomial();
    if (p.is_zero()) {
      return Expression::constant(dim(), is_sine ? 0 : 1);
    }
    if (p.num_terms() != 1) {
      fail(at, "argument of " + std::string(is_sine ? "sin" : "cos") +
                   " must be a single monomial, got '" + p.to_string(names_) + "'");
    }
    const auto& [gamma, c] = *p.terms().begin();
    if (gamma.is_zero()) fail(at, "argument of a trigonometric function must depend on the state");
    TrigAtom atom;
    atom.kind = is_sine ? TrigAtom::Kind::kSine : TrigAtom::Kind::kCosine;
    atom.frequency = abs(c);
    atom.argument = gamma;
    Expression e = Expression::atom(dim(), atom);
    // sin(-a) = -sin(a), cos(-a) = cos(a)
    if (c < 0 && is_sine) e = -e;
    return e;
  }

  std::vector<Token> tokens_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text, const std::vector<std::string>& names) {
  return Parser(text, names).parse();
}

Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& names) {
  Expression e = parse_expression(text, names);
  if (!e.is_polynomial()) {
    throw ParseError(1, 1, "expected a polynomial, found trigonometric terms in '" +
                               std::string(text) + "'");
  }
  return e.as_polynomial();
}

}  // namespace exitmoment::expr
