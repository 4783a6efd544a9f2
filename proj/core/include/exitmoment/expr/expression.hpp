#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exitmoment/expr/multi_index.hpp"
#include "exitmoment/expr/polynomial.hpp"
#include "exitmoment/expr/rational.hpp"

namespace exitmoment::expr {

/// sin(frequency * x^argument) or cos(frequency * x^argument) over the base
/// alphabet. Frequencies are always strictly positive.
struct TrigAtom {
  enum class Kind { kSine, kCosine };

  Kind kind = Kind::kSine;
  Rational frequency = 1;
  MultiIndex argument;

  /// The atom with the other kind and the same frequency/argument.
  TrigAtom partner() const;
  /// Numeric value at a base-alphabet point.
  double evaluate(std::span<const double> base_point) const;
  std::string to_string(const std::vector<std::string>& base_names) const;

  friend bool operator==(const TrigAtom& a, const TrigAtom& b) {
    return a.kind == b.kind && a.frequency == b.frequency && a.argument == b.argument;
  }
};

/// Polynomial over the base alphabet extended by one variable per registered
/// TrigAtom. Base variable i is slot i; atom k is slot base_dim() + k.
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::size_t base_dim) : base_dim_(base_dim), poly_(base_dim) {}
  explicit Expression(const Polynomial& base_poly);

  static Expression constant(std::size_t base_dim, const Rational& c);
  static Expression variable(std::size_t base_dim, std::size_t i);
  static Expression atom(std::size_t base_dim, const TrigAtom& atom);

  std::size_t base_dim() const noexcept { return base_dim_; }
  const std::vector<TrigAtom>& atoms() const noexcept { return atoms_; }
  /// Polynomial over base_dim() + atoms().size() variables.
  const Polynomial& poly() const noexcept { return poly_; }

  std::optional<std::size_t> find_atom(const TrigAtom& atom) const;
  /// Adds atom to the table (no-op if present) and returns its slot offset.
  std::size_t register_atom(const TrigAtom& atom);

  /// True when no registered atom actually appears in the terms.
  bool is_polynomial() const;
  /// The expression as a base-alphabet polynomial; throws if trig terms remain.
  Polynomial as_polynomial() const;
  bool is_zero() const { return poly_.is_zero(); }
  bool is_constant() const { return poly_.is_constant(); }

  Expression operator-() const;
  Expression& operator+=(const Expression& other);
  Expression& operator-=(const Expression& other);
  Expression& operator*=(const Expression& other);
  Expression& operator*=(const Rational& c);
  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator*(Expression a, const Expression& b) { return a *= b; }
  friend Expression operator*(Expression a, const Rational& c) { return a *= c; }
  Expression pow(unsigned exponent) const;

  /// Exact derivative with respect to base variable var (product and chain
  /// rule through the atoms). Partner atoms are registered as needed.
  Expression differentiate(std::size_t var) const;

  double evaluate(std::span<const double> base_point) const;

  /// Structural equality after aligning atom tables.
  bool equals(const Expression& other) const;

  std::string to_string(const std::vector<std::string>& base_names) const;

 private:
  /// Brings other onto this expression's atom table (extending it), returning
  /// other's polynomial re-expressed over the merged alphabet.
  Polynomial align(const Expression& other);
  void grow_to(std::size_t num_atoms);

  std::size_t base_dim_ = 0;
  std::vector<TrigAtom> atoms_;
  Polynomial poly_;
};

}  // namespace exitmoment::expr
