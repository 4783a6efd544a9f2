#include "exitmoment/expr/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "exitmoment/error.hpp"

namespace exitmoment::expr {

namespace {

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

}  // namespace

Rational parse_rational(std::string_view literal) {
  std::size_t i = 0;
  bool negative = false;
  if (i < literal.size() && (literal[i] == '+' || literal[i] == '-')) {
    negative = literal[i] == '-';
    ++i;
  }
  std::string digits;
  long scale = 0;
  bool seen_digit = false;
  while (i < literal.size() && std::isdigit(static_cast<unsigned char>(literal[i]))) {
    digits.push_back(literal[i++]);
    seen_digit = true;
  }
  if (i < literal.size() && literal[i] == '.') {
    ++i;
    while (i < literal.size() && std::isdigit(static_cast<unsigned char>(literal[i]))) {
      digits.push_back(literal[i++]);
      --scale;
      seen_digit = true;
    }
  }
  if (!seen_digit) {
    throw Error("expr", "malformed numeric literal '" + std::string(literal) + "'");
  }
  if (i < literal.size() && (literal[i] == 'e' || literal[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < literal.size() && (literal[i] == '+' || literal[i] == '-')) {
      exp_negative = literal[i] == '-';
      ++i;
    }
    long e = 0;
    bool exp_digit = false;
    while (i < literal.size() && std::isdigit(static_cast<unsigned char>(literal[i]))) {
      e = e * 10 + (literal[i++] - '0');
      exp_digit = true;
      if (e > 10000) {
        throw Error("expr", "exponent too large in '" + std::string(literal) + "'");
      }
    }
    if (!exp_digit) {
      throw Error("expr", "malformed exponent in '" + std::string(literal) + "'");
    }
    scale += exp_negative ? -e : e;
  }
  if (i != literal.size()) {
    throw Error("expr", "trailing characters in numeric literal '" + std::string(literal) + "'");
  }
  Rational value(mpz_class(digits, 10));
  value *= pow10(scale);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

Rational rational_from_double(double value, int digits) {
  if (!std::isfinite(value)) {
    throw Error("expr", "cannot convert non-finite value to a rational");
  }
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*e", digits, value);
  return parse_rational(buffer);
}

double to_double(const Rational& value) { return value.get_d(); }

std::string to_string(const Rational& value) { return value.get_str(); }

}  // namespace exitmoment::expr
