#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace exitmoment::conic {

enum class Sense { kMinimize, kMaximize };

/// Symmetric matrix-valued linear map X(x) = sum_v x_v F_v. Only the upper
/// triangle (row <= col) is stored; the lower half is implied by symmetry.
struct PsdBlock {
  struct Entry {
    int row;
    int col;
    int var;
    double coeff;
  };

  std::string name;
  int size = 0;
  std::vector<Entry> entries;

  /// Dense symmetric matrix at the point x.
  Eigen::MatrixXd materialize(const Eigen::VectorXd& x) const;
};

/// optimize c'x  s.t.  A x = rhs,  X_j(x) PSD for every block j.
struct ConicProgram {
  int num_vars = 0;
  Sense sense = Sense::kMinimize;
  Eigen::VectorXd objective;
  Eigen::SparseMatrix<double, Eigen::RowMajor> equalities;
  Eigen::VectorXd rhs;
  std::vector<PsdBlock> blocks;

  int num_equalities() const { return static_cast<int>(rhs.size()); }
  /// Sum of the block sizes.
  int psd_total_dimension() const;
  /// Throws if shapes or indices are inconsistent.
  void validate() const;
};

}  // namespace exitmoment::conic
