#include "exitmoment/expr/multi_index.hpp"

#include <numeric>
#include <sstream>

#include "exitmoment/error.hpp"

namespace exitmoment::expr {

MultiIndex::MultiIndex(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw Error("expr", "negative exponent in multi-index");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::vector<int>(exponents)) {}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t i) {
  MultiIndex alpha(dim);
  alpha.exponents_.at(i) = 1;
  return alpha;
}

int MultiIndex::degree() const noexcept {
  return std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (size() != other.size()) {
    throw Error("expr", "multi-index dimension mismatch");
  }
  MultiIndex sum(*this);
  for (std::size_t i = 0; i < size(); ++i) sum.exponents_[i] += other.exponents_[i];
  return sum;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (size() != other.size() || !dominates(other)) {
    throw Error("expr", "invalid multi-index difference");
  }
  MultiIndex diff(*this);
  for (std::size_t i = 0; i < size(); ++i) diff.exponents_[i] -= other.exponents_[i];
  return diff;
}

bool MultiIndex::dominates(const MultiIndex& other) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (exponents_[i] < other.exponents_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::remapped(std::size_t new_dim,
                                const std::vector<std::size_t>& map) const {
  MultiIndex out(new_dim);
  for (std::size_t i = 0; i < size(); ++i) {
    if (exponents_[i] != 0) out.exponents_.at(map.at(i)) += exponents_[i];
  }
  return out;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < size(); ++i) {
    if (i) os << ",";
    os << exponents_[i];
  }
  os << ")";
  return os.str();
}

bool graded_lex_precedes(const MultiIndex& a, const MultiIndex& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& alpha) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (int e : alpha.exponents()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

std::size_t monomial_count(std::size_t n, int max_degree) {
  if (max_degree < 0) return 0;
  return binomial(static_cast<int>(n) + max_degree, max_degree);
}

namespace {

// Number of multi-indices of dimension m with degree exactly d.
std::uint64_t compositions(int m, int d) {
  if (m == 0) return d == 0 ? 1 : 0;
  return binomial(d + m - 1, m - 1);
}

}  // namespace

std::size_t graded_lex_rank(const MultiIndex& alpha) {
  const int n = static_cast<int>(alpha.size());
  const int d = alpha.degree();
  std::size_t rank = monomial_count(alpha.size(), d - 1);
  int remaining = d;
  for (int i = 0; i + 1 < n; ++i) {
    // Every index that agrees on the first i slots but has a larger slot i
    // precedes alpha.
    for (int v = alpha[i] + 1; v <= remaining; ++v) {
      rank += compositions(n - i - 1, remaining - v);
    }
    remaining -= alpha[i];
  }
  return rank;
}

MultiIndex graded_lex_unrank(std::size_t n, std::size_t rank) {
  MultiIndex alpha(n);
  if (n == 0) {
    if (rank != 0) throw Error("expr", "rank out of range for empty multi-index");
    return alpha;
  }
  int d = 0;
  while (monomial_count(n, d) <= rank) ++d;
  rank -= monomial_count(n, d - 1);
  int remaining = d;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (int v = remaining; v >= 0; --v) {
      const std::uint64_t block =
          compositions(static_cast<int>(n - i - 1), remaining - v);
      if (rank < block) {
        alpha[i] = v;
        remaining -= v;
        break;
      }
      rank -= block;
    }
  }
  alpha[n - 1] = remaining;
  return alpha;
}

namespace {

void fill_degree(std::size_t slot, int remaining, MultiIndex& current,
                 std::vector<MultiIndex>& out) {
  if (slot + 1 == current.size()) {
    current[slot] = remaining;
    out.push_back(current);
    current[slot] = 0;
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current[slot] = v;
    fill_degree(slot + 1, remaining - v, current, out);
  }
  current[slot] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_graded_lex(std::size_t n, int max_degree) {
  std::vector<MultiIndex> out;
  if (max_degree < 0) return out;
  out.reserve(monomial_count(n, max_degree));
  if (n == 0) {
    out.emplace_back(0);
    return out;
  }
  MultiIndex current(n);
  for (int d = 0; d <= max_degree; ++d) fill_degree(0, d, current, out);
  return out;
}

}  // namespace exitmoment::expr
