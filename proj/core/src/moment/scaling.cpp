#include "exitmoment/moment/scaling.hpp"

#include "exitmoment/error.hpp"

namespace exitmoment::moment {

using expr::MultiIndex;
using expr::Polynomial;
using expr::Rational;

namespace {

// Positive rescaling so the largest coefficient has magnitude one.
Polynomial normalized(const Polynomial& p) {
  Rational mx = 0;
  for (const auto& [alpha, c] : p.terms()) mx = std::max(mx, Rational(abs(c)));
  if (mx == 0) return p;
  return p * (Rational(1) / mx);
}

}  // namespace

std::optional<std::pair<Rational, Rational>> variable_box(const std::vector<Polynomial>& polys,
                                                          std::size_t i) {
  std::optional<Rational> lo, hi;
  for (const auto& q : polys) {
    if (q.degree() != 1 || q.degree_in(i) != 1) continue;
    bool univariate = true;
    for (const auto& [alpha, c] : q.terms()) {
      if (!alpha.is_zero() && alpha[i] == 0) univariate = false;
    }
    if (!univariate) continue;
    const Rational a = q.coefficient(MultiIndex::unit(q.dim(), i));
    const Rational b = q.coefficient(MultiIndex(q.dim()));
    const Rational root = -b / a;
    // a x + b >= 0
    if (a > 0) {
      if (!lo || root > *lo) lo = root;
    } else {
      if (!hi || root < *hi) hi = root;
    }
  }
  if (lo && hi && *lo < *hi) return std::make_pair(*lo, *hi);
  return std::nullopt;
}

ScaledModel scale_model(const augment::AugmentedModel& m, const ScalingOptions& options) {
  if (options.time_scale <= 0) throw Error("momentproblem", "time scale must be positive");
  const std::size_t n = m.dim();
  ScaledModel s;
  s.variables = m.variables;
  s.time_index = m.time_index();
  s.time_scale = options.time_scale;
  s.center.assign(n, 0);
  s.width.assign(n, 1);
  s.width[s.time_index] = options.time_scale;
  if (options.scale_state) {
    std::vector<Polynomial> all = m.safe_polys;
    all.insert(all.end(), m.support_polys.begin(), m.support_polys.end());
    for (std::size_t i = 0; i < m.base_dim; ++i) {
      if (i == s.time_index) continue;
      if (auto box = variable_box(all, i)) {
        s.center[i] = (box->first + box->second) / 2;
        s.width[i] = (box->second - box->first) / 2;
      } else if (auto it = options.variable_widths.find(m.variables[i]); it != options.variable_widths.end()) {
        if (it->second <= 0) throw Error("momentproblem", "width of '" + it->first + "' must be positive");
        s.width[i] = it->second;
      }
    }
  }
  std::vector<Polynomial> subst;
  for (std::size_t i = 0; i < n; ++i) {
    subst.push_back(Polynomial::constant(n, s.center[i]) + Polynomial::variable(n, i) * s.width[i]);
  }
  const Rational ts = options.time_scale;
  const auto cov = m.covariance();
  s.covariance.assign(n, std::vector<Polynomial>(n, Polynomial(n)));
  for (std::size_t i = 0; i < n; ++i) {
    s.drift.push_back(m.drift[i].compose(subst) * (ts / s.width[i]));
    for (std::size_t j = 0; j < n; ++j) {
      if (cov[i][j].is_zero()) continue;
      s.covariance[i][j] = cov[i][j].compose(subst) * (ts / (s.width[i] * s.width[j]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.x0.push_back((m.x0[i] - s.center[i].get_d()) / s.width[i].get_d());
  }
  s.horizon = m.horizon / ts;
  for (const auto& q : m.safe_polys) s.safe_polys.push_back(normalized(q.compose(subst)));
  for (const auto& q : m.support_polys) s.support_polys.push_back(normalized(q.compose(subst)));
  for (const auto& q : m.support_identities) s.support_identities.push_back(q.compose(subst));
  return s;
}

}  // namespace exitmoment::moment
