#include "exitmoment/conic/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "exitmoment/error.hpp"

namespace exitmoment::conic {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Clock = std::chrono::steady_clock;

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kEqualityRhoFactor = 1e3;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct BlockLayout {
  int offset;  // first svec row
  int size;
};

// Row-stacked [A; svec(G_1); ...] in compressed column form.
SpMat stack_constraints(const ConicProgram& p, std::vector<BlockLayout>& layout) {
  std::vector<Eigen::Triplet<double>> trips;
  const int meq = p.num_equalities();
  for (int r = 0; r < p.equalities.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.equalities, r); it; ++it) {
      trips.emplace_back(r, static_cast<int>(it.col()), it.value());
    }
  }
  int row = meq;
  for (const auto& b : p.blocks) {
    layout.push_back({row, b.size});
    for (const auto& e : b.entries) {
      // svec: column-major upper triangle, off-diagonals weighted by sqrt 2.
      const int k = e.col * (e.col + 1) / 2 + e.row;
      trips.emplace_back(row + k, e.var, e.row == e.col ? e.coeff : kSqrt2 * e.coeff);
    }
    row += b.size * (b.size + 1) / 2;
  }
  SpMat m(row, p.num_vars);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void project_block(double* v, int n, EigenMethod method) {
  Eigen::MatrixXd x(n, n);
  for (int j = 0; j < n; ++j) {
    const int base = j * (j + 1) / 2;
    for (int i = 0; i < j; ++i) {
      x(i, j) = x(j, i) = v[base + i] / kSqrt2;
    }
    x(j, j) = v[base + j];
  }
  const Eigen::MatrixXd p = project_psd(x, method);
  for (int j = 0; j < n; ++j) {
    const int base = j * (j + 1) / 2;
    for (int i = 0; i < j; ++i) v[base + i] = kSqrt2 * p(i, j);
    v[base + j] = p(j, j);
  }
}

}  // namespace

void SolverSettings::validate() const {
  const auto fail = [](const std::string& msg) { throw Error("conic", msg); };
  if (max_iters <= 0) fail("max_iters must be positive");
  if (!(eps_abs > 0) || !(eps_rel > 0)) fail("tolerances must be positive");
  if (!(alpha > 1.0 && alpha < 2.0)) fail("over-relaxation must lie in (1, 2)");
  if (!(rho > 0) || !(sigma > 0)) fail("rho and sigma must be positive");
  if (check_interval <= 0 || adapt_interval <= 0) fail("intervals must be positive");
  if (anderson_memory < 0) fail("anderson_memory must be non-negative");
  if (!(anderson_safeguard > 0)) fail("anderson_safeguard must be positive");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIters: return "max_iters";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

SolveResult solve(const ConicProgram& program, const SolverSettings& settings) {
  settings.validate();
  program.validate();
  const auto start = Clock::now();
  SolveResult result;
  const int n = program.num_vars;
  const int meq = program.num_equalities();

  std::vector<BlockLayout> layout;
  SpMat m = stack_constraints(program, layout);
  const int mrows = static_cast<int>(m.rows());

  // Internally always minimize.
  const double sign = program.sense == Sense::kMaximize ? -1.0 : 1.0;
  Eigen::VectorXd c = sign * program.objective;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mrows);
  b.head(meq) = program.rhs;

  // Ruiz equilibration: x = D xs, rows scaled by E (one scalar per PSD block).
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd e = Eigen::VectorXd::Ones(mrows);
  double cost_scale = 1.0;
  if (settings.scaling) {
    SpMat ms = m;
    for (int iter = 0; iter < settings.scaling_iters; ++iter) {
      Eigen::VectorXd col_norm = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd row_norm = Eigen::VectorXd::Zero(mrows);
      for (int j = 0; j < ms.outerSize(); ++j) {
        for (SpMat::InnerIterator it(ms, j); it; ++it) {
          const double a = std::abs(it.value());
          col_norm[j] = std::max(col_norm[j], a);
          row_norm[it.row()] = std::max(row_norm[it.row()], a);
        }
      }
      Eigen::VectorXd dc(n), er(mrows);
      for (int j = 0; j < n; ++j) {
        dc[j] = col_norm[j] > 0 ? std::clamp(1.0 / std::sqrt(col_norm[j]), 1e-4, 1e4) : 1.0;
      }
      for (int r = 0; r < meq; ++r) {
        er[r] = row_norm[r] > 0 ? std::clamp(1.0 / std::sqrt(row_norm[r]), 1e-4, 1e4) : 1.0;
      }
      for (const auto& blk : layout) {
        const int rows = blk.size * (blk.size + 1) / 2;
        const double mx = row_norm.segment(blk.offset, rows).maxCoeff();
        const double s = mx > 0 ? std::clamp(1.0 / std::sqrt(mx), 1e-4, 1e4) : 1.0;
        er.segment(blk.offset, rows).setConstant(s);
      }
      ms = er.asDiagonal() * ms * dc.asDiagonal();
      d = d.cwiseProduct(dc);
      e = e.cwiseProduct(er);
    }
    const double cn = inf_norm(d.cwiseProduct(c));
    cost_scale = cn > 0 ? std::clamp(1.0 / cn, 1e-4, 1e4) : 1.0;
    m = ms;
  }
  const Eigen::VectorXd cs = cost_scale * d.cwiseProduct(c);
  const Eigen::VectorXd bs = e.cwiseProduct(b);
  const Eigen::VectorXd einv = e.cwiseInverse();
  const Eigen::VectorXd dinv = d.cwiseInverse();

  const SpMat mt = m.transpose();
  const SpMat meq_part = m.topRows(meq);
  const SpMat mpsd_part = m.bottomRows(mrows - meq);
  const SpMat ata = SpMat(meq_part.transpose()) * meq_part;
  const SpMat gtg = SpMat(mpsd_part.transpose()) * mpsd_part;
  SpMat identity(n, n);
  identity.setIdentity();

  double rho = settings.rho;
  Eigen::VectorXd rho_vec(mrows);
  auto set_rho = [&](double r) {
    rho_vec.head(meq).setConstant(kEqualityRhoFactor * r);
    rho_vec.tail(mrows - meq).setConstant(r);
  };
  set_rho(rho);

  Eigen::SimplicialLLT<SpMat> llt;
  auto factor = [&]() -> bool {
    SpMat k = (settings.sigma + 1e-9) * identity + (kEqualityRhoFactor * rho) * ata + rho * gtg;
    llt.factorize(k);
    return llt.info() == Eigen::Success;
  };
  {
    SpMat k = (settings.sigma + 1e-9) * identity + (kEqualityRhoFactor * rho) * ata + rho * gtg;
    llt.analyzePattern(k);
  }
  if (!factor()) {
    result.status = SolveStatus::kNumericalFailure;
    result.message = "Cholesky factorization failed";
    return result;
  }

  // The iteration runs on the pair (x, s) with s = z + y / rho: the cone
  // projection recovers z = P(s) and y = rho (s - z). In these coordinates one
  // ADMM step is a fixed-point map u -> T(u), which Anderson acceleration
  // extrapolates.
  const int nu = n + mrows;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(nu);
  u.tail(mrows).head(meq) = bs.head(meq);
  Eigen::VectorXd x(n), z(mrows), y(mrows), xt(n), zt(mrows), mx(mrows), mty(n), rhs(n);
  Eigen::VectorXd tu(nu), g(nu);

  auto project = [&](Eigen::VectorXd& v) {
    v.head(meq) = bs.head(meq);
    for (const auto& blk : layout) project_block(v.data() + blk.offset, blk.size, settings.eigen_method);
  };

  const int memory = settings.anderson_memory;
  Eigen::MatrixXd du(nu, std::max(memory, 1)), dg(nu, std::max(memory, 1));
  Eigen::VectorXd u_prev(nu), g_prev(nu), u_fallback(nu);
  int stored = 0;
  int next_col = 0;
  bool have_prev = false;
  bool pending = false;  // u holds an extrapolated point awaiting acceptance
  double g_norm_before = 0.0;
  auto reset_memory = [&]() {
    stored = 0;
    next_col = 0;
    have_prev = false;
    pending = false;
  };

  int last_adapt = 0;
  int iter = 0;
  result.status = SolveStatus::kMaxIters;
  for (iter = 1; iter <= settings.max_iters; ++iter) {
    x = u.head(n);
    z = u.tail(mrows);
    project(z);
    y = rho_vec.cwiseProduct(u.tail(mrows) - z);

    if (iter % settings.check_interval == 0 || iter == settings.max_iters) {
      mx = m * x;
      mty = mt * y;
      const Eigen::VectorXd pr = einv.cwiseProduct(mx - z);
      const Eigen::VectorXd dr = dinv.cwiseProduct(cs + mty) / cost_scale;
      const double rp = inf_norm(pr);
      const double rd = inf_norm(dr);
      const double mx_norm = std::max(inf_norm(einv.cwiseProduct(mx)), inf_norm(einv.cwiseProduct(z)));
      const double dual_norm = std::max(inf_norm(dinv.cwiseProduct(mty)) / cost_scale, inf_norm(c));
      const double eps_p = settings.eps_abs + settings.eps_rel * mx_norm;
      const double eps_d = settings.eps_abs + settings.eps_rel * dual_norm;
      result.primal_residual = rp;
      result.dual_residual = rd;
      if (settings.record_history) result.residual_history.push_back(std::max(rp, rd));
      if (!std::isfinite(rp) || !std::isfinite(rd)) {
        result.status = SolveStatus::kNumericalFailure;
        result.message = "non-finite iterate";
        break;
      }
      if (rp <= eps_p && rd <= eps_d) {
        result.status = SolveStatus::kOptimal;
        break;
      }
      if (settings.time_limit > 0 &&
          std::chrono::duration<double>(Clock::now() - start).count() > settings.time_limit) {
        result.message = "time limit reached";
        break;
      }
      if (settings.adaptive_rho && iter - last_adapt >= settings.adapt_interval) {
        const double ratio = (rp / eps_p) / std::max(rd / eps_d, 1e-300);
        double next = rho;
        if (ratio > 10.0) next = std::min(rho * 2.0, kRhoMax);
        if (ratio < 0.1) next = std::max(rho / 2.0, kRhoMin);
        if (next != rho) {
          rho = next;
          set_rho(rho);
          if (!factor()) {
            result.status = SolveStatus::kNumericalFailure;
            result.message = "Cholesky refactorization failed";
            break;
          }
          ++result.rho_updates;
          last_adapt = iter;
          u.tail(mrows) = z + y.cwiseQuotient(rho_vec);
          reset_memory();
        }
      }
    }

    // One relaxed ADMM step from (x, z, y).
    rhs = settings.sigma * x - cs + mt * (rho_vec.cwiseProduct(z) - y);
    xt = llt.solve(rhs);
    zt = m * xt;
    tu.head(n) = settings.alpha * xt + (1.0 - settings.alpha) * x;
    tu.tail(mrows) = settings.alpha * zt + (1.0 - settings.alpha) * z + y.cwiseQuotient(rho_vec);
    if (memory == 0) {
      u.swap(tu);
      continue;
    }
    g = tu - u;
    const double g_norm = g.norm();
    if (pending && g_norm > settings.anderson_safeguard * g_norm_before) {
      // Extrapolation made things worse: fall back to the plain step.
      u = u_fallback;
      reset_memory();
      ++result.anderson_rejections;
      continue;
    }
    pending = false;
    if (have_prev) {
      du.col(next_col) = u - u_prev;
      dg.col(next_col) = g - g_prev;
      next_col = (next_col + 1) % memory;
      stored = std::min(stored + 1, memory);
    }
    u_prev = u;
    g_prev = g;
    have_prev = true;
    if (stored == 0) {
      u.swap(tu);
      continue;
    }
    const auto dgs = dg.leftCols(stored);
    Eigen::MatrixXd gram = dgs.transpose() * dgs;
    gram.diagonal().array() += 1e-10 * std::max(gram.trace(), 1e-300);
    const Eigen::VectorXd gamma = gram.ldlt().solve(dgs.transpose() * g);
    if (!gamma.allFinite()) {
      u.swap(tu);
      reset_memory();
      continue;
    }
    u_fallback = tu;
    u = tu - (du.leftCols(stored) + dgs) * gamma;
    g_norm_before = g_norm;
    pending = true;
  }
  x = u.head(n);
  z = u.tail(mrows);
  project(z);
  y = rho_vec.cwiseProduct(u.tail(mrows) - z);
  result.iterations = std::min(iter, settings.max_iters);
  result.x = d.cwiseProduct(x);
  result.y = e.cwiseProduct(y) / cost_scale;
  result.objective = program.objective.dot(result.x);
  result.final_rho = rho;
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace exitmoment::conic
