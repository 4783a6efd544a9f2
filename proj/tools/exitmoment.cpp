#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "exitmoment/cli/pipeline.hpp"
#include "exitmoment/cli/problem_spec.hpp"
#include "exitmoment/error.hpp"

namespace {

using exitmoment::cli::RunOptions;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-relaxation bounds and Monte Carlo estimates for SDE exit times"};
  app.require_subcommand(1);
  RunOptions opts;
  std::string spec_path, K, orders, variant;
  std::uint64_t seed = 0;
  std::int64_t paths = 0;
  double dt = 0, time_limit = 0, eps = 0;
  int max_iters = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "Problem file")->required()->check(CLI::ExistingFile);
  };
  auto add_solve = [&](CLI::App* sub) {
    sub->add_option("--K", K, "Relaxation orders, e.g. 8 or 4,6,8 or 4..8");
    sub->add_option("--variant", variant, "original, reduced or both")
        ->check(CLI::IsMember({"original", "reduced", "both"}));
    sub->add_option("--orders", orders, "Exit-time moment orders, e.g. 1..6");
    sub->add_flag("--no-scaling", opts.no_scaling, "Solve in raw coordinates");
    sub->add_option("--max-iters", max_iters, "Solver iteration cap");
    sub->add_option("--time-limit", time_limit, "Solver wall-clock cap per program in seconds");
    sub->add_option("--eps", eps, "Absolute and relative solver tolerance");
  };
  auto add_mc = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--paths", paths, "Number of simulated paths");
    sub->add_option("--dt", dt, "Euler-Maruyama step");
    sub->add_option("--paths-csv", opts.paths_csv, "Write per-path exit times to this CSV file");
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", opts.out_dir, "Output directory"); };

  auto* augment = app.add_subcommand("augment", "Print the augmented polynomial SDE");
  add_common(augment);
  auto* assemble = app.add_subcommand("assemble", "Build the conic programs and export .dat-s files");
  add_common(assemble);
  add_solve(assemble);
  add_out(assemble);
  assemble->add_flag("--report-dropped-rows", opts.report_dropped_rows, "List martingale rows above degree K");
  auto* solve = app.add_subcommand("solve", "Lower and upper bounds on exit-time moments");
  add_common(solve);
  add_solve(solve);
  add_out(solve);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of exit-time moments");
  add_common(simulate);
  add_mc(simulate);
  add_out(simulate);
  simulate->add_option("--orders", orders, "Exit-time moment orders, e.g. 1..6");
  auto* report = app.add_subcommand("report", "Bounds and simulation in one table");
  add_common(report);
  add_solve(report);
  add_mc(report);
  add_out(report);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (!K.empty()) opts.K = exitmoment::cli::parse_int_list(K);
    if (!orders.empty()) opts.orders = exitmoment::cli::parse_int_list(orders);
    if (variant == "both") {
      opts.variants = std::vector{exitmoment::moment::Variant::kOriginal, exitmoment::moment::Variant::kReduced};
    } else if (!variant.empty()) {
      opts.variants = std::vector{exitmoment::moment::parse_variant(variant)};
    }
    if (seed) opts.seed = seed;
    if (paths) opts.paths = paths;
    if (dt > 0) opts.dt = dt;
    if (max_iters > 0) opts.max_iters = max_iters;
    if (time_limit > 0) opts.time_limit = time_limit;
    if (eps > 0) opts.eps = eps;
    const auto spec = exitmoment::cli::parse_spec(spec_path);
    return exitmoment::cli::run_command(command, spec, opts, std::cout, std::cerr);
  } catch (const exitmoment::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
