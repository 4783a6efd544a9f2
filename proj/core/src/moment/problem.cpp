#include "exitmoment/moment/problem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <Eigen/SparseQR>
#include <Eigen/OrderingMethods>

#include "exitmoment/error.hpp"

namespace exitmoment::moment {

using expr::MultiIndex;
using expr::Polynomial;
using expr::Rational;

std::string to_string(Variant v) { return v == Variant::kOriginal ? "original" : "reduced"; }

Variant parse_variant(const std::string& s) {
  if (s == "original") return Variant::kOriginal;
  if (s == "reduced") return Variant::kReduced;
  throw Error("momentproblem", "unknown variant '" + s + "' (expected original or reduced)");
}

Polynomial boundary_product(const std::vector<Polynomial>& safe_polys) {
  if (safe_polys.empty()) throw Error("momentproblem", "boundary product of an empty list");
  Polynomial q = safe_polys.front();
  for (std::size_t i = 1; i < safe_polys.size(); ++i) q *= safe_polys[i];
  return q;
}

namespace {

std::vector<BoundaryEquality> localizing_equalities(const Polynomial& q, int K) {
  const LocalizingMap map = build_localizing_map(q, K);
  std::vector<BoundaryEquality> out;
  std::set<MultiIndex, expr::GradedLexLess> seen;
  for (std::size_t j = 0; j < map.size(); ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const MultiIndex beta = map.base.exponent(i, j);
      if (!seen.insert(beta).second) continue;
      out.push_back({beta, map.entries(i, j)});
    }
  }
  // Deterministic order: by graded lex rank of beta.
  std::sort(out.begin(), out.end(), [](const BoundaryEquality& a, const BoundaryEquality& b) {
    return expr::graded_lex_precedes(a.beta, b.beta);
  });
  return out;
}

// sum_alpha q_alpha y_{beta + alpha} = 0 for every beta with
// |beta| + deg q <= K.
std::vector<BoundaryEquality> product_equalities(const Polynomial& q, int K) {
  std::vector<BoundaryEquality> out;
  for (const auto& beta : expr::enumerate_graded_lex(q.dim(), K - q.degree())) {
    BoundaryEquality eq{beta, {}};
    for (const auto& [alpha, c] : q.terms()) eq.terms.emplace_back(c, expr::graded_lex_rank(beta + alpha));
    out.push_back(std::move(eq));
  }
  return out;
}

}  // namespace

std::vector<BoundaryEquality> reduced_boundary_equalities(const Polynomial& qprime, int K) {
  if (qprime.is_zero()) throw Error("momentproblem", "boundary product is identically zero");
  if (qprime.degree() > K) {
    throw Error("momentproblem", "boundary product has degree " + std::to_string(qprime.degree()) +
                                     " > K = " + std::to_string(K) +
                                     "; K is too small for the reduced formulation");
  }
  return localizing_equalities(qprime, K);
}

int MomentProblem::psd_total_dimension() const {
  int total = 0;
  for (const auto& s : interior_maps) total += static_cast<int>(s.map.size());
  for (const auto& s : boundary_maps) total += static_cast<int>(s.map.size());
  return total;
}

MomentProblem build_moment_problem(const augment::AugmentedModel& model,
                                   const AssemblyOptions& options) {
  if (options.K < 1) throw Error("momentproblem", "K must be at least 1");
  if (options.moment_order < 1) throw Error("momentproblem", "moment order must be at least 1");
  if (options.moment_order - 1 > options.K) {
    throw Error("momentproblem", "moment order " + std::to_string(options.moment_order) +
                                     " needs t^" + std::to_string(options.moment_order - 1) +
                                     ", above K = " + std::to_string(options.K));
  }
  if (!augment::check_closure(model).closed) {
    throw Error("momentproblem", "model is not closed under infinitesimal generation");
  }
  MomentProblem p;
  p.options = options;
  p.model = scale_model(model, options.scaling);
  const ScaledModel& s = p.model;
  const std::size_t n = s.dim();
  const int K = options.K;
  p.moments_per_measure = expr::monomial_count(n, K);

  const generator::Generator gen(s.drift, s.covariance);
  p.rows = generator::emit_all_rows(gen, s.x0, K);

  const Polynomial one = Polynomial::constant(n, 1);
  p.interior_maps.push_back({"M(m)", Measure::kOccupation, build_localizing_map(one, K)});
  p.boundary_maps.push_back({"M(b)", Measure::kExit, build_localizing_map(one, K)});
  int index = 0;
  for (const auto& q : s.safe_polys) {
    p.interior_maps.push_back({"M(q" + std::to_string(index++) + " m)", Measure::kOccupation,
                               build_localizing_map(q, K)});
  }
  for (const auto& q : s.support_polys) {
    p.interior_maps.push_back({"M(q" + std::to_string(index++) + " m)", Measure::kOccupation,
                               build_localizing_map(q, K)});
  }

  const Polynomial qprime = boundary_product(s.safe_polys);
  if (options.variant == Variant::kReduced) {
    p.boundary_equalities = reduced_boundary_equalities(qprime, K);
  } else {
    index = 0;
    for (const auto& q : s.safe_polys) {
      p.boundary_maps.push_back({"M(q" + std::to_string(index++) + " b)", Measure::kExit,
                                 build_localizing_map(q, K)});
    }
    for (const auto& q : s.support_polys) {
      p.boundary_maps.push_back({"M(q" + std::to_string(index++) + " b)", Measure::kExit,
                                 build_localizing_map(q, K)});
    }
    if (qprime.degree() > K) {
      throw Error("momentproblem", "boundary product has degree " + std::to_string(qprime.degree()) +
                                       " > K = " + std::to_string(K));
    }
    p.boundary_maps.push_back({"M(q' b)", Measure::kExit, build_localizing_map(qprime, K)});
    p.boundary_maps.push_back({"M(-q' b)", Measure::kExit, build_localizing_map(-qprime, K)});
  }

  for (const auto& id : s.support_identities) {
    if (id.degree() > K) continue;
    for (Measure m : {Measure::kOccupation, Measure::kExit}) {
      for (auto& eq : product_equalities(id, K)) p.identity_equalities.emplace_back(m, std::move(eq));
    }
  }

  MultiIndex tpow(n);
  tpow[s.time_index] = options.moment_order - 1;
  p.objective.moment_rank = expr::graded_lex_rank(tpow);
  p.objective.coefficient = options.moment_order;
  p.objective.order = options.moment_order;
  p.objective.sense = options.sense;
  p.objective.scale = std::pow(s.time_scale.get_d(), options.moment_order);
  return p;
}

namespace {

struct Row {
  std::vector<std::pair<int, Rational>> terms;  // sorted by variable
  double rhs = 0.0;
};

Row normalize(Row r) {
  std::sort(r.terms.begin(), r.terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // Merge repeated variables.
  std::vector<std::pair<int, Rational>> merged;
  for (auto& t : r.terms) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(t);
    }
  }
  r.terms.clear();
  for (auto& t : merged)
    if (t.second != 0) r.terms.push_back(t);
  return r;
}

}  // namespace

conic::ConicProgram to_conic(const MomentProblem& p, AssemblyLog* log) {
  AssemblyLog local;
  AssemblyLog& lg = log ? *log : local;
  const int nv = static_cast<int>(p.variable_count());

  std::vector<Row> rows;
  for (const auto& r : p.rows.rows) {
    Row row;
    for (const auto& [alpha, c] : r.interior_coeffs) {
      row.terms.emplace_back(static_cast<int>(p.variable(Measure::kOccupation, expr::graded_lex_rank(alpha))), c);
    }
    row.terms.emplace_back(static_cast<int>(p.variable(Measure::kExit, expr::graded_lex_rank(r.boundary_index))), -1);
    row.rhs = -r.constant;
    rows.push_back(normalize(std::move(row)));
  }
  lg.dropped_martingale_rows = static_cast<int>(p.rows.dropped.size());
  for (const auto& eq : p.boundary_equalities) {
    Row row;
    for (const auto& [c, rank] : eq.terms) row.terms.emplace_back(static_cast<int>(p.variable(Measure::kExit, rank)), c);
    rows.push_back(normalize(std::move(row)));
  }
  for (const auto& [measure, eq] : p.identity_equalities) {
    Row row;
    for (const auto& [c, rank] : eq.terms) row.terms.emplace_back(static_cast<int>(p.variable(measure, rank)), c);
    rows.push_back(normalize(std::move(row)));
  }

  // Exact duplicate removal: rows equal up to a rational multiple.
  std::vector<Row> unique;
  std::map<std::vector<std::pair<int, Rational>>, double> seen;
  for (auto& r : rows) {
    if (r.terms.empty()) {
      if (r.rhs != 0) lg.notes.push_back("inconsistent empty equality row");
      ++lg.duplicate_rows_removed;
      continue;
    }
    const Rational lead = r.terms.front().second;
    std::vector<std::pair<int, Rational>> key;
    for (const auto& t : r.terms) key.emplace_back(t.first, t.second / lead);
    const double rhs = r.rhs / lead.get_d();
    auto [it, inserted] = seen.emplace(key, rhs);
    if (!inserted) {
      if (std::abs(it->second - rhs) > 1e-12 * std::max(1.0, std::abs(rhs))) {
        lg.notes.push_back("duplicate equality rows with different right-hand sides");
      }
      ++lg.duplicate_rows_removed;
      continue;
    }
    unique.push_back(std::move(r));
  }

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(unique.size()));
  for (std::size_t i = 0; i < unique.size(); ++i) {
    for (const auto& [var, c] : unique[i].terms) trips.emplace_back(static_cast<int>(i), var, c.get_d());
    rhs[static_cast<Eigen::Index>(i)] = unique[i].rhs;
  }

  std::vector<int> keep(unique.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
  if (p.options.prune_dependent_rows && !unique.empty()) {
    // Rank-revealing sparse QR of A^T: independent rows of A are the leading
    // pivot columns.
    Eigen::SparseMatrix<double> at(nv, static_cast<int>(unique.size()));
    std::vector<Eigen::Triplet<double>> tt;
    for (const auto& t : trips) tt.emplace_back(t.col(), t.row(), t.value());
    at.setFromTriplets(tt.begin(), tt.end());
    at.makeCompressed();
    Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(1e-10);
    qr.compute(at);
    if (qr.info() == Eigen::Success) {
      const Eigen::Index rank = qr.rank();
      if (rank < static_cast<Eigen::Index>(unique.size())) {
        std::vector<int> independent;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = 0; k < rank; ++k) independent.push_back(perm[k]);
        std::sort(independent.begin(), independent.end());
        lg.dependent_rows_removed = static_cast<int>(unique.size()) - static_cast<int>(rank);
        lg.notes.push_back("pruned " + std::to_string(lg.dependent_rows_removed) +
                           " numerically dependent equality rows");
        keep = std::move(independent);
      }
    } else {
      lg.notes.push_back("rank test skipped: sparse QR failed");
    }
  }

  conic::ConicProgram prog;
  prog.num_vars = nv;
  prog.sense = p.objective.sense;
  prog.objective = Eigen::VectorXd::Zero(nv);
  prog.objective[static_cast<Eigen::Index>(p.variable(Measure::kOccupation, p.objective.moment_rank))] =
      p.objective.coefficient.get_d();
  {
    std::vector<int> new_index(unique.size(), -1);
    for (std::size_t k = 0; k < keep.size(); ++k) new_index[keep[k]] = static_cast<int>(k);
    std::vector<Eigen::Triplet<double>> kept;
    for (const auto& t : trips) {
      if (new_index[t.row()] >= 0) kept.emplace_back(new_index[t.row()], t.col(), t.value());
    }
    prog.equalities.resize(static_cast<int>(keep.size()), nv);
    prog.equalities.setFromTriplets(kept.begin(), kept.end());
    prog.equalities.makeCompressed();
    prog.rhs.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) prog.rhs[static_cast<Eigen::Index>(k)] = rhs[keep[k]];
  }

  auto add_block = [&](const PsdSpec& spec) {
    conic::PsdBlock blk;
    blk.name = spec.name;
    blk.size = static_cast<int>(spec.map.size());
    for (std::size_t j = 0; j < spec.map.size(); ++j) {
      for (std::size_t i = 0; i <= j; ++i) {
        for (const auto& [c, rank] : spec.map.entries(i, j)) {
          blk.entries.push_back({static_cast<int>(i), static_cast<int>(j),
                                 static_cast<int>(p.variable(spec.measure, rank)), c.get_d()});
        }
      }
    }
    prog.blocks.push_back(std::move(blk));
  };
  for (const auto& s : p.interior_maps) add_block(s);
  for (const auto& s : p.boundary_maps) add_block(s);
  return prog;
}

conic::ConicProgram assemble(const augment::AugmentedModel& model, const AssemblyOptions& options,
                             AssemblyLog* log) {
  return to_conic(build_moment_problem(model, options), log);
}

double boundary_gradient_check(const augment::AugmentedModel& model, int lines, unsigned seed) {
  const std::size_t base = model.base_dim;
  std::vector<double> x0(model.x0.begin(), model.x0.begin() + static_cast<long>(base));
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  double worst = std::numeric_limits<double>::infinity();
  std::vector<double> full(model.dim(), 0.0);
  auto eval = [&](const Polynomial& q, const std::vector<double>& x) {
    std::copy(x.begin(), x.end(), full.begin());
    return q.evaluate(std::span<const double>(full));
  };
  for (int l = 0; l < lines; ++l) {
    std::vector<double> u(base);
    double norm = 0;
    for (auto& v : u) {
      v = g(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : u) v /= norm;
    auto at = [&](double s) {
      std::vector<double> x(base);
      for (std::size_t i = 0; i < base; ++i) x[i] = x0[i] + s * u[i];
      return x;
    };
    for (const auto& q : model.safe_polys) {
      // First sign change along the ray, then bisection.
      const double reach = 4.0 * (1.0 + model.horizon.get_d());
      const int steps = 400;
      double prev_s = 0.0, prev_v = eval(q, at(0.0));
      for (int k = 1; k <= steps; ++k) {
        const double s = reach * k / steps;
        const double v = eval(q, at(s));
        if ((prev_v > 0) != (v > 0)) {
          double a = prev_s, b = s;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (a + b);
            if ((eval(q, at(mid)) > 0) == (prev_v > 0)) a = mid; else b = mid;
          }
          const auto x = at(0.5 * (a + b));
          double gn = 0;
          for (std::size_t i = 0; i < base; ++i) {
            const double d = eval(q.derivative(i), x);
            gn += d * d;
          }
          worst = std::min(worst, std::sqrt(gn));
          break;
        }
        prev_s = s;
        prev_v = v;
      }
    }
  }
  return worst;
}

}  // namespace exitmoment::moment
