#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace exitmoment::expr {

/// Exponent vector of a monomial x^alpha.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : exponents_(dim, 0) {}
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents);

  static MultiIndex unit(std::size_t dim, std::size_t i);

  std::size_t size() const noexcept { return exponents_.size(); }
  int degree() const noexcept;
  bool is_zero() const noexcept { return degree() == 0; }

  int operator[](std::size_t i) const { return exponents_[i]; }
  int& operator[](std::size_t i) { return exponents_[i]; }
  const std::vector<int>& exponents() const noexcept { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise difference; the caller guarantees no component goes
  /// negative.
  MultiIndex operator-(const MultiIndex& other) const;
  /// True iff every component of *this is >= the matching one of other.
  bool dominates(const MultiIndex& other) const;

  /// Re-embeds into a larger alphabet: component i moves to slot map[i].
  MultiIndex remapped(std::size_t new_dim,
                      const std::vector<std::size_t>& map) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  std::string to_string() const;

 private:
  std::vector<int> exponents_;
};

/// Graded lexicographic order: lower total degree first; on equal degree the
/// index whose leftmost nonzero entry of (a - b) is positive comes first, so
/// for n = 3 the sequence is 000, 100, 010, 001, 200, 110, ...
bool graded_lex_precedes(const MultiIndex& a, const MultiIndex& b);

struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return graded_lex_precedes(a, b);
  }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& alpha) const noexcept;
};

/// Binomial coefficient C(n, k); 0 when k > n.
std::uint64_t binomial(int n, int k);

/// Number of multi-indices of dimension n with degree <= max_degree,
/// i.e. C(n + K, K). Zero when max_degree < 0.
std::size_t monomial_count(std::size_t n, int max_degree);

/// Zero-based position of alpha in the graded lex enumeration of all
/// multi-indices of its dimension.
std::size_t graded_lex_rank(const MultiIndex& alpha);

/// Inverse of graded_lex_rank.
MultiIndex graded_lex_unrank(std::size_t n, std::size_t rank);

/// All multi-indices of dimension n and degree <= max_degree, in graded lex
/// order, so that result[graded_lex_rank(a)] == a.
std::vector<MultiIndex> enumerate_graded_lex(std::size_t n, int max_degree);

}  // namespace exitmoment::expr
