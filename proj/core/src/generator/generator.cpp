#include "exitmoment/generator/generator.hpp"

#include <cmath>
#include <sstream>

#include "exitmoment/error.hpp"

namespace exitmoment::generator {

using expr::MultiIndex;
using expr::Polynomial;
using expr::Rational;

namespace {

// c * x^shift * p
void add_shifted(Polynomial& out, const Polynomial& p, const MultiIndex& shift, const Rational& c) {
  for (const auto& [alpha, coeff] : p.terms()) out.add_term(alpha + shift, c * coeff);
}

}  // namespace

Generator::Generator(const augment::AugmentedModel& model)
    : Generator(model.drift, model.covariance()) {
  if (!augment::check_closure(model).closed) {
    throw Error("generator", "model is not closed under infinitesimal generation");
  }
}

Generator::Generator(std::vector<Polynomial> drift, std::vector<std::vector<Polynomial>> covariance)
    : drift_(std::move(drift)), covariance_(std::move(covariance)) {
  const std::size_t n = drift_.size();
  if (covariance_.size() != n) throw Error("generator", "covariance has the wrong shape");
  for (std::size_t i = 0; i < n; ++i) {
    if (drift_[i].dim() != n || covariance_[i].size() != n) {
      throw Error("generator", "dynamics are not polynomials over the state alphabet");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (covariance_[i][j].dim() != n) throw Error("generator", "covariance over the wrong alphabet");
      if (!(covariance_[i][j] == covariance_[j][i])) throw Error("generator", "covariance is not symmetric");
    }
  }
}

Polynomial Generator::apply(const MultiIndex& k) const {
  const std::size_t n = dim();
  if (k.size() != n) throw Error("generator", "test monomial over the wrong alphabet");
  Polynomial out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] == 0) continue;
    MultiIndex ki = k;
    ki[i] -= 1;
    add_shifted(out, drift_[i], ki, k[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const Polynomial& s = covariance_[i][j];
      if (s.is_zero()) continue;
      const int kj = ki[j];
      if (kj == 0) continue;
      MultiIndex kij = ki;
      kij[j] -= 1;
      add_shifted(out, s, kij, Rational(k[i] * kj, 2));
    }
  }
  return out;
}

Polynomial Generator::apply(const Polynomial& f) const {
  Polynomial out(dim());
  for (const auto& [alpha, c] : f.terms()) out += apply(alpha) * c;
  return out;
}

Polynomial apply_generator(const augment::AugmentedModel& model, const MultiIndex& k) {
  return Generator(model).apply(k);
}

MartingaleRow martingale_row(const Generator& gen, const std::vector<double>& x0,
                             const MultiIndex& k) {
  if (x0.size() != gen.dim()) throw Error("generator", "x0 has the wrong dimension");
  MartingaleRow row;
  row.test_index = k;
  row.boundary_index = k;
  row.interior_coeffs = gen.apply(k).terms();
  double c = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (int e = 0; e < k[i]; ++e) c *= x0[i];
  }
  row.constant = c;
  return row;
}

RowSet emit_all_rows(const Generator& gen, const std::vector<double>& x0, int K) {
  if (K < 0) throw Error("generator", "K must be non-negative");
  RowSet out;
  for (const MultiIndex& k : expr::enumerate_graded_lex(gen.dim(), K)) {
    MartingaleRow row = martingale_row(gen, x0, k);
    const int degree = row.interior_coeffs.empty() ? -1 : row.interior_coeffs.rbegin()->first.degree();
    if (degree > K) {
      out.dropped.push_back({k, degree});
      continue;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string format_dropped_rows(const RowSet& rows, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << rows.dropped.size() << " martingale rows dropped (generator image above K)\n";
  for (const auto& d : rows.dropped) {
    os << "  f = " << Polynomial::monomial(d.test_index).to_string(names)
       << "  deg(Af) = " << d.image_degree << "\n";
  }
  return os.str();
}

}  // namespace exitmoment::generator
