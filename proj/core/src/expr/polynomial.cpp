#include "exitmoment/expr/polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "exitmoment/error.hpp"

namespace exitmoment::expr {

namespace {

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error("expr", "polynomial alphabet mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + " variables)");
  }
}

double ipow(double x, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

}  // namespace

Polynomial Polynomial::constant(std::size_t dim, const Rational& c) {
  Polynomial p(dim);
  p.add_term(MultiIndex(dim), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t dim, std::size_t i) {
  Polynomial p(dim);
  p.add_term(MultiIndex::unit(dim, i), 1);
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& alpha, const Rational& c) {
  Polynomial p(alpha.size());
  p.add_term(alpha, c);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_zero());
}

int Polynomial::degree() const {
  // Graded lex order puts the highest degree last.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

int Polynomial::degree_in(std::size_t i) const {
  int d = 0;
  for (const auto& [alpha, c] : terms_) d = std::max(d, alpha[i]);
  return d;
}

Rational Polynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const MultiIndex& alpha, const Rational& c) {
  check_same_dim(dim_, alpha.size());
  if (c == 0) return;
  // mpq_class(num, den) is not reduced on construction.
  Rational value = c;
  value.canonicalize();
  auto [it, inserted] = terms_.try_emplace(alpha, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r(*this);
  for (auto& [alpha, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same_dim(dim_, other.dim_);
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same_dim(dim_, other.dim_);
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  check_same_dim(a.dim_, b.dim_);
  Polynomial r(a.dim_);
  for (const auto& [alpha, ca] : a.terms_) {
    for (const auto& [beta, cb] : b.terms_) r.add_term(alpha + beta, ca * cb);
  }
  return r;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  Rational value = c;
  value.canonicalize();
  for (auto& [alpha, coeff] : terms_) coeff *= value;
  return *this;
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result = constant(dim_, 1);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    exponent >>= 1;
    if (exponent) base *= base;
  }
  return result;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= dim_) throw Error("expr", "derivative variable out of range");
  Polynomial r(dim_);
  for (const auto& [alpha, c] : terms_) {
    if (alpha[var] == 0) continue;
    MultiIndex beta = alpha;
    beta[var] -= 1;
    r.add_term(beta, c * alpha[var]);
  }
  return r;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (point.size() != dim_) {
    throw Error("expr", "evaluation point has dimension " + std::to_string(point.size()) +
                            ", expected " + std::to_string(dim_));
  }
  double sum = 0.0;
  for (const auto& [alpha, c] : terms_) {
    double term = c.get_d();
    for (std::size_t i = 0; i < dim_; ++i) {
      if (alpha[i]) term *= ipow(point[i], alpha[i]);
    }
    sum += term;
  }
  return sum;
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  if (point.size() != dim_) {
    throw Error("expr", "evaluation point has dimension " + std::to_string(point.size()) +
                            ", expected " + std::to_string(dim_));
  }
  Rational sum = 0;
  for (const auto& [alpha, c] : terms_) {
    Rational term = c;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (int k = 0; k < alpha[i]; ++k) term *= point[i];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::remapped(std::size_t new_dim,
                                const std::vector<std::size_t>& map) const {
  if (map.size() != dim_) throw Error("expr", "remap table has the wrong length");
  Polynomial r(new_dim);
  for (const auto& [alpha, c] : terms_) r.add_term(alpha.remapped(new_dim, map), c);
  return r;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& values) const {
  if (values.size() != dim_) {
    throw Error("expr", "composition needs one polynomial per variable");
  }
  const std::size_t out_dim = values.empty() ? 0 : values.front().dim();
  // Cache powers per variable; exponents stay small in practice.
  std::vector<std::vector<Polynomial>> powers(dim_);
  Polynomial r(out_dim);
  for (const auto& [alpha, c] : terms_) {
    Polynomial term = constant(out_dim, c);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (alpha[i] == 0) continue;
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(constant(out_dim, 1));
      while (static_cast<int>(cache.size()) <= alpha[i]) {
        cache.push_back(cache.back() * values[i]);
      }
      term *= cache[alpha[i]];
    }
    r += term;
  }
  return r;
}

void PrintTo(const Polynomial& p, std::ostream* os) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < p.dim(); ++i) names.push_back("x" + std::to_string(i));
  *os << p.to_string(names);
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (names.size() != dim_) throw Error("expr", "variable name table has the wrong length");
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    Rational magnitude = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (magnitude != 1 || alpha.is_zero()) {
      os << magnitude.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      if (alpha[i] == 0) continue;
      if (wrote) os << "*";
      os << names[i];
      if (alpha[i] > 1) os << "^" << alpha[i];
      wrote = true;
    }
  }
  return os.str();
}

NumericPolynomial::NumericPolynomial(const Polynomial& p) {
  for (const auto& [alpha, c] : p.terms()) {
    Term term{c.get_d(), static_cast<std::uint32_t>(factors_.size()), 0};
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i]) {
        factors_.push_back({static_cast<std::uint32_t>(i), alpha[i]});
        ++term.factor_count;
      }
    }
    terms_.push_back(term);
  }
}

double NumericPolynomial::operator()(const double* point) const {
  double sum = 0.0;
  for (const Term& term : terms_) {
    double v = term.coefficient;
    const Factor* f = factors_.data() + term.first_factor;
    for (std::uint32_t k = 0; k < term.factor_count; ++k) {
      v *= f[k].exponent == 1 ? point[f[k].var] : ipow(point[f[k].var], f[k].exponent);
    }
    sum += v;
  }
  return sum;
}

}  // namespace exitmoment::expr
