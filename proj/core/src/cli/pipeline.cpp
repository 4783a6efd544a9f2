#include "exitmoment/cli/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "exitmoment/augment/augment.hpp"
#include "exitmoment/conic/sdpa.hpp"
#include "exitmoment/error.hpp"
#include "exitmoment/generator/generator.hpp"

namespace exitmoment::cli {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cli", "cannot write '" + path + "'");
  f << content;
}

moment::AssemblyOptions assembly_options(const SolvePlan& plan, int K, moment::Variant v, int order,
                                         conic::Sense sense) {
  moment::AssemblyOptions o;
  o.K = K;
  o.variant = v;
  o.moment_order = order;
  o.sense = sense;
  o.scaling.scale_state = plan.scale_state;
  o.scaling.time_scale = plan.time_scale;
  o.scaling.variable_widths = plan.widths;
  return o;
}

void check_boundary(const augment::AugmentedModel& aug) {
  const double g = moment::boundary_gradient_check(aug);
  if (g < 1e-8) {
    throw Error("momentproblem", "a safe-set polynomial has a vanishing gradient (" + fmt("%.3g", g) +
                                     ") on the boundary; 0 may be a critical value");
  }
}

}  // namespace

bool BoundRow::optimal() const {
  return degenerate ||
         (lower_result.status == conic::SolveStatus::kOptimal && upper_result.status == conic::SolveStatus::kOptimal);
}

std::string BoundRow::status() const {
  if (degenerate) return "degenerate";
  if (optimal()) return "optimal";
  return "lower " + conic::to_string(lower_result.status) + ", upper " + conic::to_string(upper_result.status);
}

SolvePlan effective_plan(const ProblemSpec& spec, const RunOptions& opts) {
  SolvePlan plan = spec.solve;
  if (opts.K) plan.K = *opts.K;
  if (opts.orders) plan.orders = *opts.orders;
  if (opts.variants) plan.variants = *opts.variants;
  if (opts.no_scaling) {
    plan.scale_state = false;
    plan.time_scale = 1;
    plan.widths.clear();
  }
  if (opts.max_iters) plan.settings.max_iters = *opts.max_iters;
  if (opts.time_limit) plan.settings.time_limit = *opts.time_limit;
  if (opts.eps) plan.settings.eps_abs = plan.settings.eps_rel = *opts.eps;
  plan.settings.validate();
  return plan;
}

mc::McConfig effective_mc(const ProblemSpec& spec, const RunOptions& opts) {
  mc::McConfig c = spec.mc.config;
  if (opts.seed) c.seed = *opts.seed;
  if (opts.paths) c.paths = *opts.paths;
  if (opts.dt) c.dt = *opts.dt;
  if (opts.orders) {
    int top = 1;
    for (int n : *opts.orders) top = std::max(top, n);
    c.max_moment_order = std::max(c.max_moment_order, top);
  }
  c.validate(spec.horizon.get_d());
  return c;
}

bool initial_point_degenerate(const augment::AugmentedModel& m) {
  for (const auto& q : m.safe_polys) {
    if (q.evaluate(std::span<const double>(m.x0)) <= 0.0) return true;
  }
  return false;
}

ReportTable solve_bounds(const ProblemSpec& spec, const RunOptions& opts, std::ostream* progress) {
  const SolvePlan plan = effective_plan(spec, opts);
  const augment::AugmentedModel aug = augment::augment_sinusoids(spec.model());
  ReportTable table;
  table.name = spec.name;
  const bool degenerate = initial_point_degenerate(aug);
  if (!degenerate) check_boundary(aug);
  for (int K : plan.K) {
    for (moment::Variant v : plan.variants) {
      for (int order : plan.orders) {
        BoundRow row;
        row.K = K;
        row.variant = v;
        row.order = order;
        if (degenerate) {
          row.degenerate = true;
          table.rows.push_back(row);
          continue;
        }
        for (conic::Sense sense : {conic::Sense::kMinimize, conic::Sense::kMaximize}) {
          const moment::MomentProblem p = moment::build_moment_problem(aug, assembly_options(plan, K, v, order, sense));
          const conic::ConicProgram prog = moment::to_conic(p);
          row.equalities = prog.num_equalities();
          row.psd_dimension = prog.psd_total_dimension();
          conic::SolveResult r = conic::solve(prog, plan.settings);
          const double bound = r.objective * p.objective.scale;
          if (sense == conic::Sense::kMinimize) {
            row.lower = bound;
            row.lower_result = std::move(r);
          } else {
            row.upper = bound;
            row.upper_result = std::move(r);
          }
          if (progress) {
            const auto& rr = sense == conic::Sense::kMinimize ? row.lower_result : row.upper_result;
            *progress << spec.name << " K=" << K << " " << moment::to_string(v) << " order " << order
                      << (sense == conic::Sense::kMinimize ? " lower " : " upper ") << fmt("%.6f", bound) << " ("
                      << conic::to_string(rr.status) << ", " << rr.iterations << " iterations, "
                      << fmt("%.1f", rr.seconds) << " s)\n";
            progress->flush();
          }
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

std::string format_markdown(const ReportTable& t, bool with_runtime) {
  std::ostringstream out;
  out << "| K | variant | order | lower bound | upper bound | status |";
  if (t.mc) out << " simulation | sim. SE |";
  if (with_runtime) out << " seconds |";
  out << "\n|---|---|---|---|---|---|";
  if (t.mc) out << "---|---|";
  if (with_runtime) out << "---|";
  out << "\n";
  for (const auto& r : t.rows) {
    out << "| " << r.K << " | " << moment::to_string(r.variant) << " | " << r.order << " | " << fmt("%.5f", r.lower)
        << " | " << fmt("%.5f", r.upper) << " | " << r.status() << " |";
    if (t.mc) {
      const auto& m = t.mc->moments;
      if (r.order <= static_cast<int>(m.size())) {
        out << " " << fmt("%.5f", m[r.order - 1].mean) << " | " << fmt("%.5f", m[r.order - 1].standard_error) << " |";
      } else {
        out << " - | - |";
      }
    }
    if (with_runtime) out << " " << fmt("%.1f", r.lower_result.seconds + r.upper_result.seconds) << " |";
    out << "\n";
  }
  return out.str();
}

std::string format_csv(const ReportTable& t) {
  std::ostringstream out;
  out << "K,variant,order,lower,upper,status";
  if (t.mc) out << ",mc_mean,mc_se";
  out << "\n";
  for (const auto& r : t.rows) {
    out << r.K << ',' << moment::to_string(r.variant) << ',' << r.order << ',' << fmt("%.10g", r.lower) << ','
        << fmt("%.10g", r.upper) << ',' << r.status();
    if (t.mc) {
      const auto& m = t.mc->moments;
      if (r.order <= static_cast<int>(m.size())) {
        out << ',' << fmt("%.10g", m[r.order - 1].mean) << ',' << fmt("%.10g", m[r.order - 1].standard_error);
      } else {
        out << ",,";
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string format_json(const ReportTable& t) {
  using nlohmann::json;
  json rows = json::array();
  auto summary = [](const conic::SolveResult& r, double bound) {
    return json{{"status", conic::to_string(r.status)},
                {"objective", r.objective},
                {"bound", bound},
                {"primal_residual", r.primal_residual},
                {"dual_residual", r.dual_residual},
                {"iterations", r.iterations},
                {"final_rho", r.final_rho}};
  };
  for (const auto& r : t.rows) {
    json row{{"K", r.K},
             {"variant", moment::to_string(r.variant)},
             {"order", r.order},
             {"status", r.status()},
             {"lower", r.lower},
             {"upper", r.upper},
             {"equalities", r.equalities},
             {"psd_dimension", r.psd_dimension}};
    if (!r.degenerate) {
      row["lower_solve"] = summary(r.lower_result, r.lower);
      row["upper_solve"] = summary(r.upper_result, r.upper);
    }
    rows.push_back(std::move(row));
  }
  json doc{{"problem", t.name}, {"rows", rows}};
  if (t.mc) {
    json m = json::array();
    for (const auto& e : t.mc->moments) {
      m.push_back({{"order", e.order}, {"mean", e.mean}, {"standard_error", e.standard_error}});
    }
    doc["simulation"] = {{"moments", m}, {"exit_fraction", t.mc->exit_fraction}, {"paths", t.mc->paths}};
  }
  return doc.dump(2) + "\n";
}

std::string format_mc_markdown(const mc::McEstimate& est) {
  std::ostringstream out;
  out << "paths: " << est.paths << ", dt: " << fmt("%g", est.dt) << ", horizon: " << fmt("%g", est.horizon)
      << ", exit fraction: " << fmt("%.6f", est.exit_fraction) << "\n\n";
  out << "| order | mean | std. error | 95% CI low | 95% CI high |\n|---|---|---|---|---|\n";
  for (const auto& m : est.moments) {
    out << "| " << m.order << " | " << fmt("%.6f", m.mean) << " | " << fmt("%.6f", m.standard_error) << " | "
        << fmt("%.6f", m.ci_low) << " | " << fmt("%.6f", m.ci_high) << " |\n";
  }
  return out.str();
}

std::string format_mc_csv(const mc::McEstimate& est) {
  std::ostringstream out;
  out << "order,mean,standard_error,ci_low,ci_high\n";
  for (const auto& m : est.moments) {
    out << m.order << ',' << fmt("%.10g", m.mean) << ',' << fmt("%.10g", m.standard_error) << ','
        << fmt("%.10g", m.ci_low) << ',' << fmt("%.10g", m.ci_high) << "\n";
  }
  return out.str();
}

namespace {

int run_augment(const ProblemSpec& spec, std::ostream& out) {
  const augment::SdeModel model = spec.model();
  const augment::ClosureReport before = augment::check_closure(model);
  if (!before.closed) out << "input model is not closed under infinitesimal generation (" << before.witness << "); augmented system:\n\n";
  const augment::AugmentedModel aug = augment::augment_sinusoids(model);
  out << augment::format_augmented(aug);
  return 0;
}

int run_assemble(const ProblemSpec& spec, const RunOptions& opts, std::ostream& out) {
  const SolvePlan plan = effective_plan(spec, opts);
  const augment::AugmentedModel aug = augment::augment_sinusoids(spec.model());
  if (initial_point_degenerate(aug)) {
    out << "x0 is not in the interior of the safe set; every bound is 0 and no program is assembled\n";
    return 0;
  }
  check_boundary(aug);
  for (int K : plan.K) {
    for (moment::Variant v : plan.variants) {
      for (int order : plan.orders) {
        for (conic::Sense sense : {conic::Sense::kMinimize, conic::Sense::kMaximize}) {
          const auto p = moment::build_moment_problem(aug, assembly_options(plan, K, v, order, sense));
          moment::AssemblyLog log;
          const auto prog = moment::to_conic(p, &log);
          const std::string file = spec.name + "_K" + std::to_string(K) + "_" + moment::to_string(v) + "_n" +
                                   std::to_string(order) + (sense == conic::Sense::kMinimize ? "_min" : "_max") +
                                   ".dat-s";
          out << file << ": " << prog.num_vars << " variables, " << prog.num_equalities() << " equalities, "
              << prog.blocks.size() << " PSD blocks of total dimension " << prog.psd_total_dimension() << " ("
              << log.dropped_martingale_rows << " martingale rows dropped, " << log.duplicate_rows_removed
              << " duplicate and " << log.dependent_rows_removed << " dependent rows removed)\n";
          if (opts.report_dropped_rows && sense == conic::Sense::kMinimize) {
            out << generator::format_dropped_rows(p.rows, p.model.variables);
          }
          if (!opts.out_dir.empty()) {
            std::ostringstream s;
            conic::write_sdpa(prog, s);
            write_file(opts.out_dir, file, s.str());
          }
        }
      }
    }
  }
  return 0;
}

mc::McEstimate run_mc(const ProblemSpec& spec, const RunOptions& opts) {
  const mc::McConfig cfg = effective_mc(spec, opts);
  std::vector<mc::PathRecord> records;
  const mc::McEstimate est = mc::simulate_exit(spec.model(), cfg, opts.paths_csv.empty() ? nullptr : &records);
  if (!opts.paths_csv.empty()) {
    std::ofstream f(opts.paths_csv);
    if (!f) throw Error("cli", "cannot write '" + opts.paths_csv + "'");
    mc::write_path_csv(f, records);
  }
  return est;
}

void emit_table(const ReportTable& table, const std::string& stem, const RunOptions& opts, std::ostream& out) {
  out << format_markdown(table, true);
  if (opts.out_dir.empty()) return;
  write_file(opts.out_dir, stem + ".md", format_markdown(table, false));
  write_file(opts.out_dir, stem + ".csv", format_csv(table));
  write_file(opts.out_dir, stem + ".json", format_json(table));
  std::ostringstream timing;
  timing << "K,variant,order,lower_seconds,upper_seconds\n";
  for (const auto& r : table.rows) {
    timing << r.K << ',' << moment::to_string(r.variant) << ',' << r.order << ',' << fmt("%.3f", r.lower_result.seconds)
           << ',' << fmt("%.3f", r.upper_result.seconds) << "\n";
  }
  write_file(opts.out_dir, stem + "_timings.csv", timing.str());
}

}  // namespace

int run_command(const std::string& command, const ProblemSpec& spec, const RunOptions& opts, std::ostream& out,
                std::ostream& err) {
  if (command == "augment") return run_augment(spec, out);
  if (command == "assemble") return run_assemble(spec, opts, out);
  if (command == "solve") {
    const ReportTable table = solve_bounds(spec, opts, &err);
    emit_table(table, spec.name + "_solve", opts, out);
    return 0;
  }
  if (command == "simulate") {
    const mc::McEstimate est = run_mc(spec, opts);
    out << format_mc_markdown(est);
    if (!opts.out_dir.empty()) {
      write_file(opts.out_dir, spec.name + "_simulate.md", format_mc_markdown(est));
      write_file(opts.out_dir, spec.name + "_simulate.csv", format_mc_csv(est));
    }
    return 0;
  }
  if (command == "report") {
    ReportTable table = solve_bounds(spec, opts, &err);
    table.mc = run_mc(spec, opts);
    emit_table(table, spec.name + "_report", opts, out);
    out << "\n" << format_mc_markdown(*table.mc);
    return 0;
  }
  err << "unknown command '" << command << "' (expected augment, assemble, solve, simulate or report)\n";
  return 2;
}

}  // namespace exitmoment::cli
