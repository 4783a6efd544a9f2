#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exitmoment/conic/program.hpp"
#include "exitmoment/conic/psd.hpp"

namespace exitmoment::conic {

struct SolverSettings {
  int max_iters = 200000;
  double eps_abs = 1e-7;
  double eps_rel = 1e-7;
  /// Initial penalty; equality rows use 1e3 times this value.
  double rho = 1.0;
  bool adaptive_rho = true;
  /// Minimum number of iterations between penalty updates.
  int adapt_interval = 100;
  /// Over-relaxation parameter, in (1, 2).
  double alpha = 1.5;
  /// Proximal weight on x; keeps the linear system positive definite.
  double sigma = 1e-6;
  /// Ruiz equilibration of the constraint matrix.
  bool scaling = true;
  int scaling_iters = 15;
  /// Residuals are evaluated every check_interval iterations.
  int check_interval = 5;
  EigenMethod eigen_method = EigenMethod::kTridiagonalQr;
  /// Wall-clock cap in seconds; 0 disables. Hitting it reports kMaxIters.
  double time_limit = 0.0;
  /// Anderson acceleration memory on the fixed-point iteration; 0 disables.
  int anderson_memory = 10;
  /// An extrapolated step is kept only if its fixed-point residual is at
  /// most this factor times the residual before extrapolating.
  double anderson_safeguard = 1.0;
  /// Record max(primal, dual residual) at every check.
  bool record_history = false;

  /// Throws when a setting is out of range.
  void validate() const;
};

enum class SolveStatus { kOptimal, kMaxIters, kNumericalFailure };

std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  /// c'x at the returned point, in the program's own sense.
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  /// Primal point.
  Eigen::VectorXd x;
  /// Multipliers, one per equality row followed by the svec rows of each block.
  Eigen::VectorXd y;
  double final_rho = 0.0;
  int rho_updates = 0;
  int anderson_rejections = 0;
  double seconds = 0.0;
  std::vector<double> residual_history;
  std::string message;
};

/// Operator-splitting (ADMM) solver for ConicProgram: a cached sparse
/// Cholesky factorization handles the linear-system step, each PSD block is
/// projected by eigendecomposition, and the multipliers are updated with
/// over-relaxation.
SolveResult solve(const ConicProgram& program, const SolverSettings& settings = {});

}  // namespace exitmoment::conic
