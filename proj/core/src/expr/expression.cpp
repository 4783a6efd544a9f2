#include "exitmoment/expr/expression.hpp"

#include <cmath>
#include <numeric>

#include "exitmoment/error.hpp"

namespace exitmoment::expr {

TrigAtom TrigAtom::partner() const {
  TrigAtom p = *this;
  p.kind = kind == Kind::kSine ? Kind::kCosine : Kind::kSine;
  return p;
}

double TrigAtom::evaluate(std::span<const double> base_point) const {
  double arg = frequency.get_d();
  for (std::size_t i = 0; i < argument.size(); ++i) {
    arg *= std::pow(base_point[i], argument[i]);
  }
  return kind == Kind::kSine ? std::sin(arg) : std::cos(arg);
}

std::string TrigAtom::to_string(const std::vector<std::string>& base_names) const {
  std::string inner = Polynomial::monomial(argument, frequency).to_string(base_names);
  return (kind == Kind::kSine ? "sin(" : "cos(") + inner + ")";
}

Expression::Expression(const Polynomial& base_poly)
    : base_dim_(base_poly.dim()), poly_(base_poly) {}

Expression Expression::constant(std::size_t base_dim, const Rational& c) {
  return Expression(Polynomial::constant(base_dim, c));
}

Expression Expression::variable(std::size_t base_dim, std::size_t i) {
  return Expression(Polynomial::variable(base_dim, i));
}

Expression Expression::atom(std::size_t base_dim, const TrigAtom& atom) {
  if (atom.argument.size() != base_dim) {
    throw Error("expr", "trig atom argument dimension mismatch");
  }
  if (atom.frequency <= 0) throw Error("expr", "trig atom frequency must be positive");
  Expression e(base_dim);
  const std::size_t k = e.register_atom(atom);
  e.poly_ = Polynomial::variable(base_dim + 1, base_dim + k);
  return e;
}

std::optional<std::size_t> Expression::find_atom(const TrigAtom& atom) const {
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k] == atom) return k;
  }
  return std::nullopt;
}

void Expression::grow_to(std::size_t num_atoms) {
  const std::size_t old_dim = poly_.dim();
  const std::size_t new_dim = base_dim_ + num_atoms;
  if (new_dim == old_dim) return;
  std::vector<std::size_t> map(old_dim);
  std::iota(map.begin(), map.end(), 0);
  poly_ = poly_.remapped(new_dim, map);
}

std::size_t Expression::register_atom(const TrigAtom& atom) {
  if (auto k = find_atom(atom)) return *k;
  atoms_.push_back(atom);
  grow_to(atoms_.size());
  return atoms_.size() - 1;
}

bool Expression::is_polynomial() const {
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (poly_.depends_on(base_dim_ + k)) return false;
  }
  return true;
}

Polynomial Expression::as_polynomial() const {
  if (!is_polynomial()) {
    throw Error("expr", "expression contains trigonometric terms");
  }
  Polynomial p(base_dim_);
  for (const auto& [alpha, c] : poly_.terms()) {
    MultiIndex beta(base_dim_);
    for (std::size_t i = 0; i < base_dim_; ++i) beta[i] = alpha[i];
    p.add_term(beta, c);
  }
  return p;
}

Polynomial Expression::align(const Expression& other) {
  if (other.base_dim_ != base_dim_) {
    throw Error("expr", "expression base alphabet mismatch");
  }
  std::vector<std::size_t> map(other.poly_.dim());
  for (std::size_t i = 0; i < base_dim_; ++i) map[i] = i;
  for (std::size_t k = 0; k < other.atoms_.size(); ++k) {
    map[base_dim_ + k] = base_dim_ + register_atom(other.atoms_[k]);
  }
  return other.poly_.remapped(poly_.dim(), map);
}

Expression Expression::operator-() const {
  Expression r(*this);
  r.poly_ = -poly_;
  return r;
}

Expression& Expression::operator+=(const Expression& other) {
  poly_ += align(other);
  return *this;
}

Expression& Expression::operator-=(const Expression& other) {
  poly_ -= align(other);
  return *this;
}

Expression& Expression::operator*=(const Expression& other) {
  Polynomial rhs = align(other);
  poly_ *= rhs;
  return *this;
}

Expression& Expression::operator*=(const Rational& c) {
  poly_ *= c;
  return *this;
}

Expression Expression::pow(unsigned exponent) const {
  Expression r(*this);
  r.poly_ = poly_.pow(exponent);
  return r;
}

Expression Expression::differentiate(std::size_t var) const {
  if (var >= base_dim_) throw Error("expr", "derivative variable out of range");
  Expression result(*this);
  // Register partners up front so slot numbers are stable below.
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k].argument[var] > 0 && poly_.depends_on(base_dim_ + k)) {
      result.register_atom(atoms_[k].partner());
    }
  }
  const std::size_t dim = result.poly_.dim();
  const Polynomial p = result.poly_;
  Polynomial d = p.derivative(var);
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    const TrigAtom& a = result.atoms_[k];
    if (a.argument[var] == 0 || !p.depends_on(base_dim_ + k)) continue;
    // d/dx_var f(xi x^g) = xi * g_var * x^(g - e_var) * f'(xi x^g)
    MultiIndex inner(dim);
    for (std::size_t i = 0; i < base_dim_; ++i) inner[i] = a.argument[i];
    inner[var] -= 1;
    const std::size_t partner = base_dim_ + *result.find_atom(a.partner());
    inner[partner] += 1;
    Rational scale = a.frequency * a.argument[var];
    if (a.kind == TrigAtom::Kind::kCosine) scale = -scale;
    d += p.derivative(base_dim_ + k) * Polynomial::monomial(inner, scale);
  }
  result.poly_ = std::move(d);
  return result;
}

double Expression::evaluate(std::span<const double> base_point) const {
  if (base_point.size() != base_dim_) {
    throw Error("expr", "evaluation point has dimension " +
                            std::to_string(base_point.size()) + ", expected " +
                            std::to_string(base_dim_));
  }
  std::vector<double> full(base_point.begin(), base_point.end());
  for (const TrigAtom& a : atoms_) full.push_back(a.evaluate(base_point));
  return poly_.evaluate(std::span<const double>(full));
}

bool Expression::equals(const Expression& other) const {
  Expression diff(*this);
  diff -= other;
  return diff.is_zero();
}

std::string Expression::to_string(const std::vector<std::string>& base_names) const {
  std::vector<std::string> names = base_names;
  for (const TrigAtom& a : atoms_) names.push_back(a.to_string(base_names));
  return poly_.to_string(names);
}

}  // namespace exitmoment::expr
