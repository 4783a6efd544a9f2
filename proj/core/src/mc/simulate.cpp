#include "exitmoment/mc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "exitmoment/error.hpp"
#include "exitmoment/mc/philox.hpp"

namespace exitmoment::mc {

NumericExpression::NumericExpression(const expr::Expression& e)
    : base_dim_(e.base_dim()), poly_(e.poly()) {
  for (const auto& atom : e.atoms()) {
    atoms_.push_back({atom.kind == expr::TrigAtom::Kind::kSine, atom.frequency.get_d(),
                      expr::NumericPolynomial(expr::Polynomial::monomial(atom.argument))});
  }
}

double NumericExpression::operator()(const double* point, double* scratch) const {
  if (atoms_.empty()) return poly_(point);
  std::copy(point, point + base_dim_, scratch);
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    const double arg = atoms_[k].frequency * atoms_[k].argument(point);
    scratch[base_dim_ + k] = atoms_[k].sine ? std::sin(arg) : std::cos(arg);
  }
  return poly_(scratch);
}

namespace {

std::vector<std::vector<expr::NumericPolynomial>> gradients(const std::vector<expr::Polynomial>& polys,
                                                            std::size_t states) {
  std::vector<std::vector<expr::NumericPolynomial>> out;
  for (const auto& q : polys) {
    std::vector<expr::NumericPolynomial> g;
    for (std::size_t i = 0; i < states; ++i) g.emplace_back(q.derivative(i));
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

NumericSde::NumericSde(const augment::SdeModel& m)
    : alphabet_(m.alphabet_size()), brownian_dim_(m.brownian_dim), time_is_state_(m.time_is_state) {
  m.validate();
  if (time_is_state_) throw Error("mc", "expected a model without a time state; use the augmented form");
  std::size_t scratch = alphabet_;
  for (const auto& h : m.drift) {
    drift_.emplace_back(h);
    scratch = std::max(scratch, drift_.back().scratch_size());
  }
  for (const auto& row : m.diffusion) {
    std::vector<NumericExpression> r;
    for (const auto& s : row) {
      r.emplace_back(s);
      scratch = std::max(scratch, r.back().scratch_size());
    }
    diffusion_.push_back(std::move(r));
  }
  for (const auto& q : m.safe_polys) safe_.emplace_back(q);
  safe_gradient_ = gradients(m.safe_polys, drift_.size());
  scratch_.resize(scratch);
  drift_buf_.resize(drift_.size());
  sigma_buf_.resize(drift_.size() * brownian_dim_);
}

NumericSde::NumericSde(const augment::AugmentedModel& m)
    : alphabet_(m.dim()), brownian_dim_(m.brownian_dim), time_is_state_(true) {
  for (const auto& h : m.drift) drift_.emplace_back(expr::Expression(h));
  for (const auto& row : m.diffusion) {
    std::vector<NumericExpression> r;
    for (const auto& s : row) r.emplace_back(expr::Expression(s));
    diffusion_.push_back(std::move(r));
  }
  for (const auto& q : m.safe_polys) safe_.emplace_back(q);
  safe_gradient_ = gradients(m.safe_polys, drift_.size());
  time_override_ = m.time_index();
  scratch_.resize(alphabet_);
  drift_buf_.resize(drift_.size());
  sigma_buf_.resize(drift_.size() * brownian_dim_);
}

void NumericSde::evaluate_diffusion(const double* point) const {
  for (std::size_t i = 0; i < diffusion_.size(); ++i) {
    for (std::size_t k = 0; k < brownian_dim_; ++k) {
      const auto& s = diffusion_[i][k];
      sigma_buf_[i * brownian_dim_ + k] = s.is_zero() ? 0.0 : s(point, scratch_.data());
    }
  }
}

void NumericSde::step(double* point, double dt, const double* dw, double* boundary_variance) const {
  for (std::size_t i = 0; i < drift_.size(); ++i) drift_buf_[i] = drift_[i](point, scratch_.data());
  evaluate_diffusion(point);
  if (boundary_variance) {
    for (std::size_t q = 0; q < safe_.size(); ++q) boundary_variance[q] = cached_boundary_diffusion(q, point);
  }
  for (std::size_t i = 0; i < drift_.size(); ++i) {
    double inc = drift_buf_[i] * dt;
    for (std::size_t k = 0; k < brownian_dim_; ++k) inc += sigma_buf_[i * brownian_dim_ + k] * dw[k];
    point[i] += inc;
  }
  if (!time_is_state_) point[time_index()] += dt;
}

double NumericSde::safe_margin(const double* point, std::size_t* argmin) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < safe_.size(); ++i) {
    const double v = safe_[i](point);
    if (v < best) {
      best = v;
      if (argmin) *argmin = i;
    }
  }
  return best;
}

double NumericSde::boundary_diffusion(std::size_t i, const double* point) const {
  evaluate_diffusion(point);
  return cached_boundary_diffusion(i, point);
}

double NumericSde::cached_boundary_diffusion(std::size_t i, const double* point) const {
  double total = 0.0;
  for (std::size_t k = 0; k < brownian_dim_; ++k) {
    double g = 0.0;
    for (std::size_t j = 0; j < drift_.size(); ++j) {
      const double s = sigma_buf_[j * brownian_dim_ + k];
      if (s != 0.0) g += safe_gradient_[i][j](point) * s;
    }
    total += g * g;
  }
  return total;
}

void McConfig::validate(double model_horizon) const {
  const double T = horizon > 0 ? horizon : model_horizon;
  if (!(dt > 0)) throw Error("mc", "dt must be positive");
  if (paths < 1) throw Error("mc", "paths must be at least 1");
  if (!(T > 0)) throw Error("mc", "horizon must be positive");
  if (dt > T) throw Error("mc", "dt must not exceed the horizon");
  if (max_moment_order < 1) throw Error("mc", "max_moment_order must be at least 1");
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

namespace {

constexpr double kCapTolerance = 1e-12;

struct PathOutcome {
  double tau = 0.0;
  bool finite = true;
};

PathOutcome run_path(const NumericSde& sde, const std::vector<double>& start, double T, const McConfig& cfg,
                     std::int64_t path_id) {
  PathStream rng(cfg.seed, static_cast<std::uint64_t>(path_id));
  const std::size_t nq = sde.safe_count();
  std::vector<double> x = start;
  std::vector<double> dw(sde.brownian_dim());
  std::vector<double> q0(nq), q1(nq), var(nq);
  const std::size_t ti = sde.time_index();
  for (std::size_t i = 0; i < nq; ++i) {
    q0[i] = sde.safe_value(i, x.data());
    if (q0[i] <= 0.0) return {0.0, true};
  }
  double* bridge = cfg.bridge_correction ? var.data() : nullptr;
  while (x[ti] < T * (1 - kCapTolerance)) {
    const double t = x[ti];
    const double h = std::min(cfg.dt, T - t);
    const double sq = std::sqrt(h);
    for (auto& w : dw) w = sq * rng.normal();
    sde.step(x.data(), h, dw.data(), bridge);
    x[ti] = t + h;
    for (double v : x) {
      if (!std::isfinite(v)) return {t, false};
    }
    // Exit inside the step: earliest linear crossing among violated faces.
    double theta = 2.0;
    for (std::size_t i = 0; i < nq; ++i) {
      q1[i] = sde.safe_value(i, x.data());
      if (q1[i] < 0.0) theta = std::min(theta, q0[i] / (q0[i] - q1[i]));
    }
    if (theta <= 1.0) return {t + theta * h, true};
    if (bridge) {
      // Probability that a Brownian bridge with the local boundary-normal
      // variance touches q_i = 0 between two interior grid points.
      double survive = 1.0;
      for (std::size_t i = 0; i < nq; ++i) {
        const double v = var[i] * h;
        if (v <= 0.0) continue;
        const double e = 2.0 * q0[i] * q1[i] / v;
        if (e < 40.0) survive *= 1.0 - std::exp(-e);
      }
      if (survive < 1.0 && rng.uniform() > survive) return {t + 0.5 * h, true};
    }
    std::swap(q0, q1);
  }
  return {T, true};
}

McEstimate estimate(const NumericSde& sde, const std::vector<double>& start, double model_T, const McConfig& cfg,
                    std::vector<PathRecord>* records) {
  cfg.validate(model_T);
  const double T = cfg.horizon > 0 ? cfg.horizon : model_T;
  std::vector<double> taus;
  taus.reserve(static_cast<std::size_t>(cfg.paths));
  std::int64_t flagged = 0, exited = 0;
  if (records) records->clear();
  for (std::int64_t p = 0; p < cfg.paths; ++p) {
    const PathOutcome out = run_path(sde, start, T, cfg, p);
    if (!out.finite) {
      ++flagged;
      continue;
    }
    const bool capped = out.tau >= T * (1 - kCapTolerance);
    if (!capped) ++exited;
    taus.push_back(capped ? T : out.tau);
    if (records) records->push_back({p, taus.back(), capped});
  }
  if (static_cast<double>(flagged) > 1e-3 * static_cast<double>(cfg.paths)) {
    throw Error("mc", std::to_string(flagged) + " of " + std::to_string(cfg.paths) +
                          " paths produced non-finite states");
  }
  McEstimate est;
  est.paths = static_cast<std::int64_t>(taus.size());
  est.flagged_paths = flagged;
  est.dt = cfg.dt;
  est.horizon = T;
  const std::size_t n = taus.size();
  est.exit_fraction = n ? static_cast<double>(exited) / static_cast<double>(n) : 0.0;
  std::vector<double> powers(n), dev(n);
  for (int order = 1; order <= cfg.max_moment_order; ++order) {
    for (std::size_t i = 0; i < n; ++i) powers[i] = std::pow(taus[i], order);
    MomentEstimate m;
    m.order = order;
    m.mean = n ? pairwise_sum(powers.data(), n) / static_cast<double>(n) : 0.0;
    if (n > 1) {
      for (std::size_t i = 0; i < n; ++i) dev[i] = (powers[i] - m.mean) * (powers[i] - m.mean);
      const double var = pairwise_sum(dev.data(), n) / static_cast<double>(n - 1);
      m.standard_error = std::sqrt(var / static_cast<double>(n));
    }
    m.ci_low = m.mean - 1.959963984540054 * m.standard_error;
    m.ci_high = m.mean + 1.959963984540054 * m.standard_error;
    est.moments.push_back(m);
  }
  return est;
}

}  // namespace

McEstimate simulate_exit(const augment::SdeModel& m, const McConfig& cfg, std::vector<PathRecord>* records) {
  const NumericSde sde(m);
  return estimate(sde, m.initial_point(), m.horizon.get_d(), cfg, records);
}

McEstimate simulate_exit(const augment::AugmentedModel& m, const McConfig& cfg, std::vector<PathRecord>* records) {
  const NumericSde sde(m);
  return estimate(sde, m.x0, m.horizon.get_d(), cfg, records);
}

void write_path_csv(std::ostream& out, const std::vector<PathRecord>& records) {
  out << "path_id,tau,capped\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.tau);
    out << r.path_id << ',' << buf << ',' << (r.capped ? 1 : 0) << '\n';
  }
}

PathConsistencyReport path_consistency(const augment::SdeModel& original, const augment::AugmentedModel& augmented,
                                       const McConfig& cfg) {
  const double T = cfg.horizon > 0 ? std::min(cfg.horizon, original.horizon.get_d()) : original.horizon.get_d();
  cfg.validate(T);
  const NumericSde a(original), b(augmented);
  PathConsistencyReport report;
  report.atom_deviation.assign(augmented.atoms.size(), 0.0);
  std::vector<std::string> base_names(augmented.variables.begin(),
                                      augmented.variables.begin() + static_cast<long>(augmented.base_dim));
  for (const auto& atom : augmented.atoms) report.atom_names.push_back(atom.to_string(base_names));
  const std::size_t n_orig = original.alphabet_size();
  const std::size_t base = augmented.base_dim;
  if (n_orig != base) throw Error("mc", "augmented model does not derive from the original");
  std::vector<double> dw(original.brownian_dim);
  for (std::int64_t p = 0; p < cfg.paths; ++p) {
    PathStream rng(cfg.seed, static_cast<std::uint64_t>(p));
    std::vector<double> x = original.initial_point();
    std::vector<double> y = augmented.x0;
    double t = 0.0;
    while (t < T * (1 - kCapTolerance)) {
      const double h = std::min(cfg.dt, T - t);
      const double sq = std::sqrt(h);
      for (auto& w : dw) w = sq * rng.normal();
      a.step(x.data(), h, dw.data());
      b.step(y.data(), h, dw.data());
      t += h;
      x[a.time_index()] = t;
      y[augmented.time_index()] = t;
      bool finite = true;
      for (std::size_t k = 0; k < augmented.atoms.size(); ++k) {
        const double truth = augmented.atoms[k].evaluate(std::span<const double>(x.data(), base));
        const double dev = std::abs(y[base + k] - truth);
        if (!std::isfinite(dev)) {
          finite = false;
          break;
        }
        report.atom_deviation[k] = std::max(report.atom_deviation[k], dev);
      }
      if (!finite) break;
    }
  }
  for (double d : report.atom_deviation) report.max_deviation = std::max(report.max_deviation, d);
  return report;
}

}  // namespace exitmoment::mc
