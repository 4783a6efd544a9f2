#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace exitmoment::expr {

using Rational = mpq_class;

/// Parses an integer, decimal, or scientific literal ("3", "-0.25", "9.81",
/// "1e-3") into an exact rational.
Rational parse_rational(std::string_view literal);

/// Closest rational with denominator 10^digits; used for user-provided doubles.
Rational rational_from_double(double value, int digits = 12);

double to_double(const Rational& value);

/// "3", "-1/2", ...
std::string to_string(const Rational& value);

}  // namespace exitmoment::expr
