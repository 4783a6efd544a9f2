#include "exitmoment/moment/index_map.hpp"

#include "exitmoment/error.hpp"

namespace exitmoment::moment {

std::size_t MomentIndexMap::entry(std::size_t i, std::size_t j) const {
  return expr::graded_lex_rank(basis.at(i) + basis.at(j));
}

MomentIndexMap build_moment_map(std::size_t dim, int max_degree) {
  if (max_degree < 0) throw Error("momentproblem", "moment degree must be non-negative");
  MomentIndexMap m;
  m.dim = dim;
  m.max_degree = max_degree;
  m.basis = expr::enumerate_graded_lex(dim, max_degree / 2);
  return m;
}

std::vector<std::pair<expr::Rational, std::size_t>> LocalizingMap::entries(std::size_t i,
                                                                          std::size_t j) const {
  const expr::MultiIndex beta = base.exponent(i, j);
  std::vector<std::pair<expr::Rational, std::size_t>> out;
  out.reserve(q.num_terms());
  for (const auto& [alpha, c] : q.terms()) out.emplace_back(c, expr::graded_lex_rank(beta + alpha));
  return out;
}

LocalizingMap build_localizing_map(const expr::Polynomial& q, int K) {
  if (q.is_zero()) throw Error("momentproblem", "localizing polynomial is identically zero");
  const int d = q.degree();
  if (d > K) {
    throw Error("momentproblem", "localizing polynomial of degree " + std::to_string(d) +
                                     " exceeds the moment degree K = " + std::to_string(K));
  }
  LocalizingMap m;
  m.q = q;
  m.K = K;
  m.base = build_moment_map(q.dim(), K - d);
  return m;
}

}  // namespace exitmoment::moment
