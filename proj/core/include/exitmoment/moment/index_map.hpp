#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "exitmoment/expr/multi_index.hpp"
#include "exitmoment/expr/polynomial.hpp"

namespace exitmoment::moment {

/// Index pattern of the moment matrix M(m)(i, j) = m_{basis_i + basis_j}
/// for moments up to degree max_degree; the basis has degree
/// floor(max_degree / 2).
struct MomentIndexMap {
  std::size_t dim = 0;
  int max_degree = 0;
  std::vector<expr::MultiIndex> basis;

  std::size_t size() const noexcept { return basis.size(); }
  /// Graded lex rank of basis[i] + basis[j].
  std::size_t entry(std::size_t i, std::size_t j) const;
  expr::MultiIndex exponent(std::size_t i, std::size_t j) const { return basis[i] + basis[j]; }
};

MomentIndexMap build_moment_map(std::size_t dim, int max_degree);

/// M(q m)(i, j) = sum_alpha q_alpha m_{beta(i,j) + alpha}, with a basis small
/// enough that every referenced moment has degree <= K.
struct LocalizingMap {
  expr::Polynomial q;
  int K = 0;
  MomentIndexMap base;

  std::size_t size() const noexcept { return base.size(); }
  /// (coefficient, moment rank) pairs of entry (i, j).
  std::vector<std::pair<expr::Rational, std::size_t>> entries(std::size_t i, std::size_t j) const;
};

/// Throws when deg(q) > K.
LocalizingMap build_localizing_map(const expr::Polynomial& q, int K);

}  // namespace exitmoment::moment
