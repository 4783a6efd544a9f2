#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "exitmoment/augment/augment.hpp"
#include "exitmoment/conic/program.hpp"
#include "exitmoment/expr/polynomial.hpp"
#include "exitmoment/generator/generator.hpp"
#include "exitmoment/moment/index_map.hpp"
#include "exitmoment/moment/scaling.hpp"

namespace exitmoment::moment {

/// original: boundary localizing PSD blocks; reduced: the boundary product
/// becomes scalar equalities on the exit moments.
enum class Variant { kOriginal, kReduced };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

enum class Measure { kOccupation, kExit };

/// Linear equality over the exit moments b: sum coeff * b_rank = 0.
struct BoundaryEquality {
  expr::MultiIndex beta;
  std::vector<std::pair<expr::Rational, std::size_t>> terms;
};

/// q' = prod q_i. Throws on an empty list.
expr::Polynomial boundary_product(const std::vector<expr::Polynomial>& safe_polys);

/// sum_alpha q'_alpha b_{beta(i,j) + alpha} = 0 for every upper-triangle
/// entry of the q'-localizing structure, one equality per distinct beta.
std::vector<BoundaryEquality> reduced_boundary_equalities(const expr::Polynomial& qprime, int K);

struct PsdSpec {
  std::string name;
  Measure measure;
  LocalizingMap map;
};

struct AssemblyOptions {
  Variant variant = Variant::kReduced;
  int K = 4;
  /// Exit-time moment order n; the objective is n * m_{t^(n-1)}.
  int moment_order = 1;
  conic::Sense sense = conic::Sense::kMaximize;
  ScalingOptions scaling;
  /// Drop numerically dependent equality rows (sparse QR rank test).
  bool prune_dependent_rows = true;
};

struct Objective {
  /// Rank of t^(n-1) among the occupation moments.
  std::size_t moment_rank = 0;
  expr::Rational coefficient = 1;
  /// Bound on E[(tau ^ T)^n] = scale * program objective.
  double scale = 1.0;
  int order = 1;
  conic::Sense sense = conic::Sense::kMaximize;
};

/// Symbolic description of the relaxation. The variable vector is
/// [m_0 .. m_{N-1}, b_0 .. b_{N-1}] with N = C(dim + K, K), moments in graded
/// lex order.
struct MomentProblem {
  ScaledModel model;
  AssemblyOptions options;
  std::size_t moments_per_measure = 0;
  generator::RowSet rows;
  std::vector<BoundaryEquality> boundary_equalities;
  /// (measure, equality) pairs from support identities such as s^2 + c^2 = 1.
  std::vector<std::pair<Measure, BoundaryEquality>> identity_equalities;
  std::vector<PsdSpec> interior_maps;
  std::vector<PsdSpec> boundary_maps;
  Objective objective;

  std::size_t variable_count() const noexcept { return 2 * moments_per_measure; }
  std::size_t variable(Measure m, std::size_t rank) const {
    return m == Measure::kOccupation ? rank : moments_per_measure + rank;
  }
  /// Number of PSD blocks and their total dimension, by construction.
  int psd_total_dimension() const;
};

MomentProblem build_moment_problem(const augment::AugmentedModel& model,
                                   const AssemblyOptions& options);

struct AssemblyLog {
  int duplicate_rows_removed = 0;
  int dependent_rows_removed = 0;
  int dropped_martingale_rows = 0;
  std::vector<std::string> notes;
};

conic::ConicProgram to_conic(const MomentProblem& problem, AssemblyLog* log = nullptr);

/// build_moment_problem followed by to_conic.
conic::ConicProgram assemble(const augment::AugmentedModel& model, const AssemblyOptions& options,
                             AssemblyLog* log = nullptr);

/// Samples the boundary of {q_i >= 0} along random lines through x0 (base
/// variables only) and reports the smallest gradient norm found at a
/// boundary point. Values below 1e-8 indicate 0 may be a critical value.
double boundary_gradient_check(const augment::AugmentedModel& model, int lines = 64,
                               unsigned seed = 1);

}  // namespace exitmoment::moment
