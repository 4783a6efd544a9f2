#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "exitmoment/augment/sde_model.hpp"
#include "exitmoment/expr/expression.hpp"
#include "exitmoment/expr/polynomial.hpp"

namespace exitmoment::augment {

/// Polynomial SDE over the augmented alphabet [x..., t, sin atoms..., cos
/// atoms...].
struct AugmentedModel {
  std::vector<std::string> variables;
  /// Number of leading non-atom variables (state plus time).
  std::size_t base_dim = 0;
  std::size_t brownian_dim = 0;
  /// Atom k lives in variable base_dim + k.
  std::vector<expr::TrigAtom> atoms;
  std::vector<expr::Polynomial> drift;
  std::vector<std::vector<expr::Polynomial>> diffusion;
  std::vector<double> x0;
  expr::Rational horizon = 1;
  /// Exit-relevant safe set description (user polynomials and T - t).
  std::vector<expr::Polynomial> safe_polys;
  /// Additional valid inequalities: t >= 0 and 1 - s^2, 1 - c^2 per atom.
  std::vector<expr::Polynomial> support_polys;
  /// Polynomials that vanish identically on the support: s^2 + c^2 - 1 for
  /// each sine/cosine pair.
  std::vector<expr::Polynomial> support_identities;

  std::size_t dim() const noexcept { return variables.size(); }
  std::size_t time_index() const noexcept { return base_dim - 1; }

  /// sigma * sigma^T as a dim() x dim() matrix.
  std::vector<std::vector<expr::Polynomial>> covariance() const;
};

/// Appends t as a state: drift 1, zero diffusion row, x0 gains 0, safe set
/// gains T - t >= 0 and the support gains t >= 0.
SdeModel augment_time(const SdeModel& m);

/// Every (frequency, argument) mode that appears in the dynamics, each
/// reported as a sine and a cosine atom. Sines of all modes come first, then
/// the cosines, each in first-appearance order (sine modes before
/// cosine-only modes).
std::vector<expr::TrigAtom> collect_trig_atoms(const SdeModel& m);

/// Replaces every trig atom by a new state whose dynamics follow from Ito's
/// formula. Applies augment_time first when t is not yet a state.
AugmentedModel augment_sinusoids(const SdeModel& m);

struct ClosureReport {
  bool closed = true;
  /// First offending entry, e.g. "drift[0] = sin(x)".
  std::string witness;
};

/// Closed under generation iff every drift entry and every entry of
/// sigma*sigma^T is a polynomial over the model alphabet.
ClosureReport check_closure(const SdeModel& m);
ClosureReport check_closure(const AugmentedModel& m);

/// Human-readable multi-line rendering of an augmented SDE.
std::string format_augmented(const AugmentedModel& m);

}  // namespace exitmoment::augment
