#include "exitmoment/expr/expression.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "exitmoment/expr/parser.hpp"

namespace exitmoment::expr {
namespace {

double central_difference(const Expression& e, std::vector<double> p, std::size_t var) {
  const double h = 1e-5 * std::max(1.0, std::abs(p[var]));
  p[var] += h;
  const double up = e.evaluate(p);
  p[var] -= 2 * h;
  const double down = e.evaluate(p);
  return (up - down) / (2 * h);
}

TEST(ExpressionTest, TrigDerivatives) {
  const std::vector<std::string> names = {"x"};
  const Expression s = parse_expression("sin(x)", names);
  EXPECT_TRUE(s.differentiate(0).equals(parse_expression("cos(x)", names)));
  EXPECT_TRUE(parse_expression("cos(x)", names)
                  .differentiate(0)
                  .equals(parse_expression("-sin(x)", names)));
}

TEST(ExpressionTest, ChainRuleMatchesFiniteDifference) {
  const std::vector<std::string> names = {"x1", "x2"};
  const Expression e = parse_expression("sin(2*x1*x2)", names);
  const Expression d = e.differentiate(0);
  EXPECT_TRUE(d.equals(parse_expression("2*x2*cos(2*x1*x2)", names)));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> p = {u(rng), u(rng)};
    EXPECT_NEAR(d.evaluate(p), central_difference(e, p, 0), 1e-6);
  }
}

TEST(ExpressionTest, MixedPartialsCommute) {
  const std::vector<std::string> names = {"x", "y"};
  const Expression e =
      parse_expression("x^2*sin(3*x*y^2) - cos(y/2)*y + sin(x)^2*cos(x)*x*y", names);
  EXPECT_TRUE(e.differentiate(0).differentiate(1).equals(e.differentiate(1).differentiate(0)));
}

TEST(ExpressionTest, DerivativeMatchesFiniteDifference) {
  const std::vector<std::string> names = {"x", "y", "t"};
  const Expression e =
      parse_expression("x*y^2*cos(x) + sin(0.5*y*t)*x - 3*t^2 + cos(2*x)^2", names);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t var = 0; var < 3; ++var) {
    const Expression d = e.differentiate(var);
    for (int i = 0; i < 20; ++i) {
      const std::vector<double> p = {u(rng), u(rng), u(rng)};
      const double fd = central_difference(e, p, var);
      EXPECT_NEAR(d.evaluate(p), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(ExpressionTest, Evaluate) {
  const std::vector<std::string> names = {"x"};
  const double zero[] = {0.0};
  EXPECT_DOUBLE_EQ(parse_expression("sin(x)", names).evaluate(zero), 0.0);
  const Expression e = parse_expression("cos(x)*sin(x)*(1 - 1/2*cos(x))", names);
  const double x = 0.7;
  const double expected = std::cos(x) * std::sin(x) * (1 - 0.5 * std::cos(x));
  const double pt[] = {x};
  EXPECT_NEAR(e.evaluate(pt), expected, 1e-12);
  EXPECT_THROW(e.evaluate(std::vector<double>{1.0, 2.0}), std::exception);
}

TEST(ExpressionTest, NoTrigIdentitiesApplied) {
  const std::vector<std::string> names = {"x"};
  const Expression e = parse_expression("sin(x)^2 + cos(x)^2", names);
  EXPECT_FALSE(e.is_constant());
  EXPECT_EQ(e.atoms().size(), 2u);
}

TEST(ExpressionTest, PolynomialRoundTrip) {
  const std::vector<std::string> names = {"x", "v"};
  const Expression e = parse_expression("v*x + 1", names);
  EXPECT_TRUE(e.is_polynomial());
  EXPECT_EQ(e.as_polynomial(), parse_polynomial("1 + x*v", names));
  EXPECT_THROW(parse_expression("sin(x)", names).as_polynomial(), std::exception);
}

TEST(ParserTest, CanonicalizesTrigSigns) {
  const std::vector<std::string> names = {"x"};
  EXPECT_TRUE(parse_expression("sin(-2*x)", names).equals(parse_expression("-sin(2*x)", names)));
  EXPECT_TRUE(parse_expression("cos(-x)", names).equals(parse_expression("cos(x)", names)));
  const Expression e = parse_expression("sin(-x/3)", names);
  ASSERT_EQ(e.atoms().size(), 1u);
  EXPECT_EQ(e.atoms()[0].frequency, Rational(1, 3));
  EXPECT_TRUE(parse_expression("sin(0*x) + cos(0)", names).equals(parse_expression("1", names)));
}

TEST(ParserTest, ExactDecimals) {
  const std::vector<std::string> names = {"x"};
  EXPECT_EQ(parse_polynomial("9.81", names).coefficient(MultiIndex{0}), Rational(981, 100));
  EXPECT_EQ(parse_polynomial("1e-3*x", names).coefficient(MultiIndex{1}), Rational(1, 1000));
  EXPECT_EQ(parse_polynomial("-(9.81/5)", names).coefficient(MultiIndex{0}), Rational(-981, 500));
  EXPECT_EQ(parse_rational("0.1"), Rational(1, 10));
}

TEST(ParserTest, Errors) {
  const std::vector<std::string> names = {"x", "y"};
  EXPECT_THROW(parse_expression("", names), ParseError);
  EXPECT_THROW(parse_expression("x + ", names), ParseError);
  EXPECT_THROW(parse_expression("sin(x + y)", names), ParseError);
  EXPECT_THROW(parse_expression("sin(2)", names), ParseError);
  EXPECT_THROW(parse_expression("exp(x)", names), ParseError);
  EXPECT_THROW(parse_expression("x / y", names), ParseError);
  EXPECT_THROW(parse_expression("x ^ 1.5", names), ParseError);
  try {
    parse_expression("x +\n  2*z", names);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 5);
    EXPECT_NE(std::string(e.what()).find("undeclared variable 'z'"), std::string::npos);
  }
}

}  // namespace
}  // namespace exitmoment::expr
