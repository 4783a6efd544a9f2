#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exitmoment/cli/problem_spec.hpp"
#include "exitmoment/conic/solver.hpp"
#include "exitmoment/mc/simulate.hpp"
#include "exitmoment/moment/problem.hpp"

namespace exitmoment::cli {

/// Command-line overrides of the problem file.
struct RunOptions {
  std::optional<std::vector<int>> K;
  std::optional<std::vector<int>> orders;
  std::optional<std::vector<moment::Variant>> variants;
  /// Directory for report and export files; empty writes nothing.
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> paths;
  std::optional<double> dt;
  std::optional<int> max_iters;
  std::optional<double> time_limit;
  std::optional<double> eps;
  bool report_dropped_rows = false;
  bool no_scaling = false;
  /// Per-path CSV dump for simulate/report.
  std::string paths_csv;
};

struct BoundRow {
  int K = 0;
  moment::Variant variant = moment::Variant::kReduced;
  int order = 1;
  double lower = 0.0;
  double upper = 0.0;
  conic::SolveResult lower_result;
  conic::SolveResult upper_result;
  /// x0 outside the interior: bounds are 0 and no program was solved.
  bool degenerate = false;
  int equalities = 0;
  int psd_dimension = 0;

  bool optimal() const;
  std::string status() const;
};

struct ReportTable {
  std::string name;
  std::vector<BoundRow> rows;
  std::optional<mc::McEstimate> mc;
};

/// Effective settings after applying overrides.
SolvePlan effective_plan(const ProblemSpec& spec, const RunOptions& opts);
mc::McConfig effective_mc(const ProblemSpec& spec, const RunOptions& opts);

/// True when some safe polynomial is <= 0 at x0.
bool initial_point_degenerate(const augment::AugmentedModel& m);

/// Lower and upper bounds for every (K, variant, order) of the plan.
ReportTable solve_bounds(const ProblemSpec& spec, const RunOptions& opts, std::ostream* progress = nullptr);

std::string format_markdown(const ReportTable& table, bool with_runtime);
std::string format_csv(const ReportTable& table);
std::string format_json(const ReportTable& table);
std::string format_mc_markdown(const mc::McEstimate& est);
std::string format_mc_csv(const mc::McEstimate& est);

/// Dispatches augment | assemble | solve | simulate | report. Returns the
/// process exit code.
int run_command(const std::string& command, const ProblemSpec& spec, const RunOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace exitmoment::cli
