#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "exitmoment/augment/augment.hpp"
#include "exitmoment/expr/multi_index.hpp"
#include "exitmoment/expr/polynomial.hpp"

namespace exitmoment::generator {

/// Infinitesimal generator Af = sum_i h_i df/dx_i + 1/2 sum_ij (sigma
/// sigma^T)_ij d2f/dx_i dx_j of a polynomial diffusion. The covariance is
/// computed once at construction.
class Generator {
 public:
  explicit Generator(const augment::AugmentedModel& model);
  /// Direct form, used after rescaling where only sigma*sigma^T is rational.
  Generator(std::vector<expr::Polynomial> drift,
            std::vector<std::vector<expr::Polynomial>> covariance);

  std::size_t dim() const noexcept { return drift_.size(); }
  const std::vector<expr::Polynomial>& drift() const noexcept { return drift_; }
  const std::vector<std::vector<expr::Polynomial>>& covariance() const noexcept {
    return covariance_;
  }

  /// A applied to the monomial x^k.
  expr::Polynomial apply(const expr::MultiIndex& k) const;
  /// A applied to an arbitrary polynomial (linear combination of monomials).
  expr::Polynomial apply(const expr::Polynomial& f) const;

 private:
  std::vector<expr::Polynomial> drift_;
  std::vector<std::vector<expr::Polynomial>> covariance_;
};

expr::Polynomial apply_generator(const augment::AugmentedModel& model, const expr::MultiIndex& k);

/// sum_j c_j m_j + x0^k - b_k = 0 for the test function f = x^k.
struct MartingaleRow {
  expr::MultiIndex test_index;
  /// Coefficients of A(x^k); the moment index j carries c_j.
  expr::Polynomial::Terms interior_coeffs;
  /// Always equal to test_index; b_k enters with coefficient -1.
  expr::MultiIndex boundary_index;
  /// x0^k.
  double constant = 0.0;
};

MartingaleRow martingale_row(const Generator& gen, const std::vector<double>& x0,
                             const expr::MultiIndex& k);

struct DroppedRow {
  expr::MultiIndex test_index;
  /// Degree of A(x^k), which exceeded K.
  int image_degree = 0;
};

struct RowSet {
  /// Sorted by graded lex rank of the test index.
  std::vector<MartingaleRow> rows;
  std::vector<DroppedRow> dropped;
};

/// One row per test monomial of degree <= K whose generator image also has
/// degree <= K; the others are reported as dropped.
RowSet emit_all_rows(const Generator& gen, const std::vector<double>& x0, int K);

/// Text report of dropped rows, one per line.
std::string format_dropped_rows(const RowSet& rows, const std::vector<std::string>& names);

}  // namespace exitmoment::generator
