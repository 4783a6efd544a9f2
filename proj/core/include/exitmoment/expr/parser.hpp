#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "exitmoment/error.hpp"
#include "exitmoment/expr/expression.hpp"

namespace exitmoment::expr {

/// Syntax or semantic error in expression text, with a 1-based position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// The message without the position prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

/// Parses infix text over the given variable names. Supports + - * ^,
/// division by constants, parentheses, exact decimal literals, and
/// sin(...)/cos(...) of a rational multiple of a monomial.
Expression parse_expression(std::string_view text, const std::vector<std::string>& names);

/// As parse_expression, but rejects trigonometric terms.
Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& names);

}  // namespace exitmoment::expr
