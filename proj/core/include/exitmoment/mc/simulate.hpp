#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "exitmoment/augment/augment.hpp"
#include "exitmoment/augment/sde_model.hpp"
#include "exitmoment/expr/expression.hpp"
#include "exitmoment/expr/polynomial.hpp"

namespace exitmoment::mc {

/// Floating-point form of an Expression: atoms are evaluated first, then the
/// polynomial over base variables and atom values.
class NumericExpression {
 public:
  NumericExpression() = default;
  explicit NumericExpression(const expr::Expression& e);

  /// scratch must hold base_dim + atom count doubles; the first base_dim are
  /// overwritten with point.
  double operator()(const double* point, double* scratch) const;
  std::size_t scratch_size() const noexcept { return base_dim_ + atoms_.size(); }
  bool is_zero() const noexcept { return poly_.is_zero(); }

 private:
  struct Atom {
    bool sine;
    double frequency;
    expr::NumericPolynomial argument;
  };
  std::size_t base_dim_ = 0;
  std::vector<Atom> atoms_;
  expr::NumericPolynomial poly_;
};

/// Euler-Maruyama ready form of an SDE over an alphabet whose last variable
/// is time.
class NumericSde {
 public:
  explicit NumericSde(const augment::SdeModel& m);
  /// The augmented polynomial system (time is a state with drift 1).
  explicit NumericSde(const augment::AugmentedModel& m);

  std::size_t alphabet() const noexcept { return alphabet_; }
  std::size_t states() const noexcept { return drift_.size(); }
  std::size_t brownian_dim() const noexcept { return brownian_dim_; }
  std::size_t time_index() const noexcept { return time_is_state_ ? time_override_ : alphabet_ - 1; }
  std::size_t safe_count() const noexcept { return safe_.size(); }

  /// One step: point[0..states) advanced in place; time is advanced by dt.
  /// dw holds brownian_dim increments already scaled by sqrt(dt).
  /// If boundary_variance is non-null it receives |grad q_i * sigma|^2 at the
  /// pre-step point, one entry per safe polynomial.
  void step(double* point, double dt, const double* dw, double* boundary_variance = nullptr) const;
  /// Minimum over safe polynomials, and the index attaining it.
  double safe_margin(const double* point, std::size_t* argmin = nullptr) const;
  double safe_value(std::size_t i, const double* point) const { return safe_[i](point); }
  /// |grad q_i(point) * sigma(point)|^2.
  double boundary_diffusion(std::size_t i, const double* point) const;

 private:
  std::size_t alphabet_ = 0;
  std::size_t brownian_dim_ = 0;
  bool time_is_state_ = false;
  std::size_t time_override_ = 0;
  std::vector<NumericExpression> drift_;
  std::vector<std::vector<NumericExpression>> diffusion_;
  std::vector<expr::NumericPolynomial> safe_;
  std::vector<std::vector<expr::NumericPolynomial>> safe_gradient_;
  void evaluate_diffusion(const double* point) const;
  double cached_boundary_diffusion(std::size_t i, const double* point) const;

  mutable std::vector<double> scratch_, drift_buf_, sigma_buf_;
};

struct McConfig {
  double dt = 1e-4;
  std::int64_t paths = 10000;
  std::uint64_t seed = 1;
  /// 0 uses the model horizon.
  double horizon = 0.0;
  int max_moment_order = 1;
  /// Brownian-bridge test for excursions between grid points.
  bool bridge_correction = true;

  void validate(double model_horizon) const;
};

struct MomentEstimate {
  int order = 1;
  double mean = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct PathRecord {
  std::int64_t path_id = 0;
  double tau = 0.0;
  bool capped = false;
};

struct McEstimate {
  std::vector<MomentEstimate> moments;
  /// Fraction of paths with tau < T.
  double exit_fraction = 0.0;
  std::int64_t paths = 0;
  std::int64_t flagged_paths = 0;
  double dt = 0.0;
  double horizon = 0.0;
};

/// Pairwise (cascade) summation.
double pairwise_sum(const double* values, std::size_t n);

/// Monte Carlo estimates of E[(tau ^ T)^n], n = 1..max_moment_order. Exit is
/// declared at the first step where some q_i < 0, with the crossing time
/// interpolated linearly inside the step. records, if non-null, receives one
/// entry per path.
McEstimate simulate_exit(const augment::SdeModel& m, const McConfig& cfg,
                         std::vector<PathRecord>* records = nullptr);

/// Same estimator for an augmented polynomial system.
McEstimate simulate_exit(const augment::AugmentedModel& m, const McConfig& cfg,
                         std::vector<PathRecord>* records = nullptr);

/// CSV with columns path_id,tau,capped.
void write_path_csv(std::ostream& out, const std::vector<PathRecord>& records);

struct PathConsistencyReport {
  double max_deviation = 0.0;
  /// Per atom state, in augmented order.
  std::vector<double> atom_deviation;
  std::vector<std::string> atom_names;
};

/// Drives the original and the augmented systems with identical Gaussian
/// increments up to min(T, cfg.horizon) without exit, and reports the largest
/// |augmented atom state - atom(original state)| seen.
PathConsistencyReport path_consistency(const augment::SdeModel& original,
                                       const augment::AugmentedModel& augmented,
                                       const McConfig& cfg);

}  // namespace exitmoment::mc
