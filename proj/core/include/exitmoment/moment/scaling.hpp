#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exitmoment/augment/augment.hpp"
#include "exitmoment/expr/polynomial.hpp"

namespace exitmoment::moment {

struct ScalingOptions {
  /// Map every state variable with a box bound into [-1, 1].
  bool scale_state = true;
  /// t = time_scale * t'. Moments of order n are un-scaled by time_scale^n.
  expr::Rational time_scale = 1;
  /// x = width * y for named variables without a box (e.g. velocities).
  std::map<std::string, expr::Rational> variable_widths;
};

/// The polynomial data the relaxation is built from, expressed in scaled
/// coordinates x = center + width * y (time: t = time_scale * t').
struct ScaledModel {
  std::vector<std::string> variables;
  std::size_t time_index = 0;
  std::vector<expr::Polynomial> drift;
  std::vector<std::vector<expr::Polynomial>> covariance;
  std::vector<double> x0;
  expr::Rational horizon = 1;
  std::vector<expr::Polynomial> safe_polys;
  std::vector<expr::Polynomial> support_polys;
  std::vector<expr::Polynomial> support_identities;
  std::vector<expr::Rational> center;
  std::vector<expr::Rational> width;
  expr::Rational time_scale = 1;

  std::size_t dim() const noexcept { return variables.size(); }
};

/// Interval [lo, hi] for variable i implied by univariate linear polynomials
/// in polys, if both ends are present.
std::optional<std::pair<expr::Rational, expr::Rational>> variable_box(
    const std::vector<expr::Polynomial>& polys, std::size_t i);

ScaledModel scale_model(const augment::AugmentedModel& m, const ScalingOptions& options = {});

}  // namespace exitmoment::moment
