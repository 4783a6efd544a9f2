#include "exitmoment/conic/psd.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "exitmoment/error.hpp"

namespace exitmoment::conic {

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, double threshold) {
  const Eigen::Index n = input.rows();
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  const long max_sweeps = 100L * n * n;
  long sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= threshold * scale) break;
    if (sweep >= max_sweeps) throw Error("conic", "Jacobi eigensolver did not converge");
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        // Rotation angle chosen to annihilate a(p, q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return {a.diagonal(), v};
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m, EigenMethod method) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (method == EigenMethod::kJacobi) {
    SymmetricEigen e = jacobi_eigen(sym);
    values = std::move(e.values);
    vectors = std::move(e.vectors);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw Error("conic", "eigensolver did not converge");
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }
  bool any_negative = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < 0) {
      values[i] = 0;
      any_negative = true;
    }
  }
  if (!any_negative) return sym;
  return vectors * values.asDiagonal() * vectors.transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace exitmoment::conic
