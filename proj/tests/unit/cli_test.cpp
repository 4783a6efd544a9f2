#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "exitmoment/augment/augment.hpp"
#include "exitmoment/cli/pipeline.hpp"
#include "exitmoment/cli/problem_spec.hpp"
#include "exitmoment/conic/sdpa.hpp"
#include "exitmoment/moment/problem.hpp"

namespace exitmoment::cli {
namespace {

std::string problem(const std::string& name) { return std::string(EXITMOMENT_SOURCE_DIR) + "/problems/" + name; }

std::string read(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TEST(ProblemSpecTest, Brownian) {
  const ProblemSpec spec = parse_spec(problem("brownian.spec"));
  EXPECT_EQ(spec.name, "brownian");
  EXPECT_EQ(spec.state, std::vector<std::string>{"y"});
  EXPECT_EQ(spec.x0, std::vector<double>{0.5});
  EXPECT_EQ(spec.horizon, 10);
  EXPECT_EQ(spec.solve.K, std::vector<int>{8});
  EXPECT_EQ(spec.solve.orders, (std::vector<int>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(spec.mc.config.paths, 1000000);
  const auto m = spec.model();
  EXPECT_EQ(m.variables, (std::vector<std::string>{"y", "t"}));
  EXPECT_EQ(m.safe_polys.size(), 2u);
}

TEST(ProblemSpecTest, SpringMass) {
  const ProblemSpec spec = parse_spec(problem("springmass.spec"));
  EXPECT_EQ(spec.state, (std::vector<std::string>{"x", "v"}));
  EXPECT_DOUBLE_EQ(spec.x0[0], -9.81 / 5);
  EXPECT_EQ(spec.drift[1], "-5*x - 9.81 + v*sin(x)");
  const auto aug = augment::augment_sinusoids(spec.model());
  EXPECT_EQ(aug.dim(), 5u);
}

TEST(ProblemSpecTest, CommittedFilesParse) {
  for (const char* f : {"brownian.spec", "springmass.spec", "springmass_wide.spec", "sinusoid.spec"}) {
    EXPECT_NO_THROW(parse_spec(problem(f))) << f;
  }
}

void expect_error(const std::string& text, int line, int column, const std::string& fragment) {
  try {
    parse_spec_text(text, "test.spec");
    FAIL() << "expected an error for:\n" << text;
  } catch (const SpecError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.column(), column) << e.what();
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

const char* kMinimal =
    "[state]\nvariables = [\"x\"]\nx0 = [0]\n[dynamics]\ndrift = [\"0\"]\ndiffusion = [[\"1\"]]\nhorizon = 1\n"
    "[safe_set]\npolys = [\"1 - x^2\"]\n";

TEST(ProblemSpecTest, Errors) {
  expect_error("", 1, 1, "empty");
  expect_error("# only a comment\n", 1, 1, "empty");
  expect_error("[state]\nvariables = [\"x\"\n", 3, 1, "unterminated array");
  expect_error("[bogus]\n", 1, 1, "unknown section");
  expect_error("[state]\nvariables = [\"x\"]\nx0 = [0]\n[dynamics]\ndrift = [\"y\"]\n", 5, 11, "undeclared variable");
  expect_error("[state]\nvariables = [\"x\"]\nx0 = [0]\n[dynamics]\ndrift = [\"tan(x)\"]\n", 5, 11, "unsupported function");
  expect_error("[state]\nvariables = [\"x\"]\nx0 = [0]\n[dynamics]\ndrift = [\"sin(x + 1)\"]\n", 5, 15, "monomial");
  expect_error("[state]\nvariables = [\"x\"]\nx0 = [0, 1]\n", 3, 6, "x0 has 2 entries");
  expect_error(std::string(kMinimal) + "colour = 3\n", 10, 1, "unknown key");
  expect_error(std::string(kMinimal) + "[solve]\nvariants = [\"full\"]\n", 11, 13, "unknown variant");
  expect_error("[state]\nvariables = [\"x\"]\nx0 = [0]\n", 1, 1, "missing section [dynamics]");
  expect_error(std::string(kMinimal) + "[solve]\nwidths = [[\"y\", 2]]\n", 11, 12, "unknown state variable");
  expect_error(std::string(kMinimal) + "[solve]\nwidths = [[\"x\", 0]]\n", 11, 17, "positive");
  expect_error(std::string(kMinimal) + "[solve]\nwidths = [\"x\"]\n", 11, 11, "pairs");
}

TEST(ProblemSpecTest, Widths) {
  const ProblemSpec spec = parse_spec_text(std::string(kMinimal) + "[solve]\nwidths = [[\"x\", \"5/2\"]]\n");
  ASSERT_EQ(spec.solve.widths.size(), 1u);
  EXPECT_EQ(spec.solve.widths.at("x"), expr::Rational(5, 2));
}

TEST(ProblemSpecTest, MinimalDefaults) {
  const ProblemSpec spec = parse_spec_text(kMinimal);
  EXPECT_EQ(spec.solve.K, std::vector<int>{4});
  EXPECT_EQ(spec.solve.variants, std::vector<moment::Variant>{moment::Variant::kReduced});
}

TEST(ProblemSpecTest, IntegerLists) {
  EXPECT_EQ(parse_int_list("1..3"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(parse_int_list("4,6,8"), (std::vector<int>{4, 6, 8}));
  EXPECT_EQ(parse_int_list("8"), (std::vector<int>{8}));
  EXPECT_THROW(parse_int_list("3..1"), Error);
  EXPECT_THROW(parse_int_list("a"), Error);
}

TEST(PipelineTest, AugmentListsSpringMassDynamics) {
  std::ostringstream out, err;
  ASSERT_EQ(run_command("augment", parse_spec(problem("springmass.spec")), {}, out, err), 0);
  const std::string s = out.str();
  for (const char* line : {"dx: v", "dv: -981/100 - 5*x + v*sin(x)", "dt: 1", "dsin(x): v*cos(x)",
                           "dcos(x): -v*sin(x)"}) {
    EXPECT_NE(s.find(line), std::string::npos) << line << "\n" << s;
  }
}

TEST(PipelineTest, DegenerateStartReportsZero) {
  std::string text = kMinimal;
  text.replace(text.find("x0 = [0]"), 8, "x0 = [1]");
  const ProblemSpec spec = parse_spec_text(text);
  const ReportTable t = solve_bounds(spec, {});
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_TRUE(t.rows[0].degenerate);
  EXPECT_EQ(t.rows[0].lower, 0.0);
  EXPECT_EQ(t.rows[0].upper, 0.0);
  EXPECT_EQ(t.rows[0].status(), "degenerate");
}

TEST(PipelineTest, SolveIsReproducible) {
  const ProblemSpec spec = parse_spec(problem("brownian.spec"));
  RunOptions opts;
  opts.K = std::vector<int>{4};
  opts.orders = std::vector<int>{1, 2};
  const auto dir = std::filesystem::temp_directory_path() / "exitmoment_cli_test";
  std::filesystem::remove_all(dir);
  std::string first;
  for (int run = 0; run < 2; ++run) {
    opts.out_dir = (dir / std::to_string(run)).string();
    std::ostringstream out, err;
    ASSERT_EQ(run_command("solve", spec, opts, out, err), 0);
    for (const char* ext : {".md", ".csv", ".json"}) {
      const std::string content = read(opts.out_dir + "/brownian_solve" + ext);
      EXPECT_FALSE(content.empty());
      if (run == 0) first += content;
    }
  }
  std::string second;
  for (const char* ext : {".md", ".csv", ".json"}) second += read((dir / "1" / "brownian_solve").string() + ext);
  EXPECT_EQ(first, second);
  const ReportTable t = solve_bounds(spec, opts);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.optimal());
    EXPECT_LE(r.lower, r.upper + 1e-6);
  }
}

TEST(PipelineTest, AssembleRoundTrips) {
  const ProblemSpec spec = parse_spec(problem("brownian.spec"));
  RunOptions opts;
  opts.K = std::vector<int>{4};
  opts.orders = std::vector<int>{1};
  opts.report_dropped_rows = true;
  opts.out_dir = (std::filesystem::temp_directory_path() / "exitmoment_assemble_test").string();
  std::ostringstream out, err;
  ASSERT_EQ(run_command("assemble", spec, opts, out, err), 0);
  const auto aug = augment::augment_sinusoids(spec.model());
  moment::AssemblyOptions o;
  o.K = 4;
  o.sense = conic::Sense::kMaximize;
  const conic::ConicProgram mem = moment::assemble(aug, o);
  const conic::ConicProgram disk = conic::import_sdpa(opts.out_dir + "/brownian_K4_reduced_n1_max.dat-s");
  EXPECT_EQ(disk.num_vars, mem.num_vars);
  EXPECT_EQ(disk.sense, mem.sense);
  EXPECT_EQ((disk.objective - mem.objective).norm(), 0.0);
  EXPECT_EQ(disk.num_equalities(), mem.num_equalities());
  EXPECT_EQ((Eigen::MatrixXd(disk.equalities) - Eigen::MatrixXd(mem.equalities)).norm(), 0.0);
  EXPECT_EQ((disk.rhs - mem.rhs).norm(), 0.0);
  ASSERT_EQ(disk.blocks.size(), mem.blocks.size());
  Eigen::VectorXd probe = Eigen::VectorXd::LinSpaced(mem.num_vars, -1.0, 2.0);
  for (std::size_t k = 0; k < mem.blocks.size(); ++k) {
    EXPECT_EQ((disk.blocks[k].materialize(probe) - mem.blocks[k].materialize(probe)).norm(), 0.0);
  }
  EXPECT_NE(out.str().find("dropped"), std::string::npos);
}

TEST(PipelineTest, SimulateGolden) {
  const ProblemSpec spec = parse_spec(problem("brownian.spec"));
  RunOptions opts;
  opts.paths = 1000;
  opts.seed = 1;
  std::ostringstream out, err;
  ASSERT_EQ(run_command("simulate", spec, opts, out, err), 0);
  const std::string golden = read(std::string(EXITMOMENT_SOURCE_DIR) + "/tests/golden/simulate_brownian.md");
  EXPECT_EQ(out.str(), golden);
}

}  // namespace
}  // namespace exitmoment::cli
