#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "exitmoment/expr/expression.hpp"
#include "exitmoment/expr/polynomial.hpp"

namespace exitmoment::augment {

/// dX = h(X, t) dt + sigma(X, t) dB on the safe set {q_i >= 0}, over an
/// alphabet whose last entry is always the time variable. Before time
/// augmentation the state is every variable except t; afterwards t is the
/// last state with drift 1 and a zero diffusion row.
struct SdeModel {
  std::vector<std::string> variables;
  bool time_is_state = false;
  std::size_t brownian_dim = 0;
  /// One entry per state variable, in alphabet order.
  std::vector<expr::Expression> drift;
  /// state_dim() rows of brownian_dim entries.
  std::vector<std::vector<expr::Expression>> diffusion;
  std::vector<double> x0;
  expr::Rational horizon = 1;
  /// Polynomials over the alphabet that define the safe set. Leaving
  /// {q_i >= 0} is what terminates a path.
  std::vector<expr::Polynomial> safe_polys;
  /// Valid inequalities on the support that do not describe the exit
  /// boundary (e.g. t >= 0).
  std::vector<expr::Polynomial> support_polys;

  std::size_t alphabet_size() const noexcept { return variables.size(); }
  std::size_t time_index() const noexcept { return variables.size() - 1; }
  std::size_t state_dim() const noexcept {
    return time_is_state ? variables.size() : variables.size() - 1;
  }

  /// Throws if the shapes are inconsistent or an expression uses a different
  /// alphabet.
  void validate() const;

  /// The point (x0, 0) in the full alphabet.
  std::vector<double> initial_point() const;
};

/// Builds an SdeModel from expression strings in the expr grammar. The time
/// variable "t" is appended to state_names.
SdeModel make_model(const std::vector<std::string>& state_names,
                    const std::vector<std::string>& drift,
                    const std::vector<std::vector<std::string>>& diffusion,
                    const std::vector<double>& x0, const expr::Rational& horizon,
                    const std::vector<std::string>& safe_polys);

}  // namespace exitmoment::augment
