#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exitmoment/expr/multi_index.hpp"
#include "exitmoment/expr/rational.hpp"

namespace exitmoment::expr {

/// Sparse multivariate polynomial with exact rational coefficients over a
/// fixed number of variables. Terms iterate in graded lex order and zero
/// coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, Rational, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {}

  static Polynomial constant(std::size_t dim, const Rational& c);
  static Polynomial variable(std::size_t dim, std::size_t i);
  static Polynomial monomial(const MultiIndex& alpha, const Rational& c = 1);

  std::size_t dim() const noexcept { return dim_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t num_terms() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  /// Highest exponent of variable i over all terms.
  int degree_in(std::size_t i) const;
  bool depends_on(std::size_t i) const { return degree_in(i) > 0; }

  Rational coefficient(const MultiIndex& alpha) const;
  void add_term(const MultiIndex& alpha, const Rational& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned exponent) const;
  Polynomial derivative(std::size_t var) const;

  double evaluate(std::span<const double> point) const;
  Rational evaluate(std::span<const Rational> point) const;

  /// Re-embeds into a larger alphabet; variable i becomes variable map[i].
  Polynomial remapped(std::size_t new_dim, const std::vector<std::size_t>& map) const;
  /// Substitutes values[i] (all over one common alphabet) for variable i.
  Polynomial compose(const std::vector<Polynomial>& values) const;

  /// Human-readable form, e.g. "-981/100 - 5*x + v*s".
  std::string to_string(const std::vector<std::string>& names) const;

 private:
  std::size_t dim_ = 0;
  Terms terms_;
};

/// Debug printer (variables named x0, x1, ...); picked up by gtest.
void PrintTo(const Polynomial& p, std::ostream* os);

/// Floating-point evaluation form of a Polynomial for hot loops.
class NumericPolynomial {
 public:
  NumericPolynomial() = default;
  explicit NumericPolynomial(const Polynomial& p);

  double operator()(const double* point) const;
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept { return factors_.empty(); }

 private:
  struct Factor {
    std::uint32_t var;
    int exponent;
  };
  struct Term {
    double coefficient;
    std::uint32_t first_factor;
    std::uint32_t factor_count;
  };
  std::vector<Term> terms_;
  std::vector<Factor> factors_;
};

}  // namespace exitmoment::expr
