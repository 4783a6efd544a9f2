#pragma once

#include <Eigen/Dense>

namespace exitmoment::conic {

enum class EigenMethod {
  /// Householder tridiagonalization + implicit QR (Eigen).
  kTridiagonalQr,
  /// Cyclic Jacobi rotations; slower, kept as an independent reference.
  kJacobi,
};

struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Sweeps stop when
/// the off-diagonal Frobenius norm drops below threshold * ||A||_F; throws
/// when 100 * n^2 sweeps do not suffice.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double threshold = 1e-12);

/// Nearest PSD matrix in Frobenius norm: symmetrize, eigendecompose, clamp
/// negative eigenvalues to zero.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m,
                            EigenMethod method = EigenMethod::kTridiagonalQr);

double min_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace exitmoment::conic
