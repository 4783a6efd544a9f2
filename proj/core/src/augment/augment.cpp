#include "exitmoment/augment/augment.hpp"

#include <sstream>

#include "exitmoment/error.hpp"

namespace exitmoment::augment {

using expr::Expression;
using expr::MultiIndex;
using expr::Polynomial;
using expr::Rational;
using expr::TrigAtom;

namespace {

struct Mode {
  Rational frequency;
  MultiIndex argument;
  bool operator==(const Mode& o) const {
    return frequency == o.frequency && argument == o.argument;
  }
};

std::vector<const Expression*> dynamics_entries(const SdeModel& m) {
  std::vector<const Expression*> out;
  for (const auto& e : m.drift) out.push_back(&e);
  for (const auto& row : m.diffusion)
    for (const auto& e : row) out.push_back(&e);
  return out;
}

std::vector<std::vector<Expression>> expression_covariance(const SdeModel& m) {
  const std::size_t n = m.state_dim();
  std::vector<std::vector<Expression>> cov(n, std::vector<Expression>(n, Expression(m.alphabet_size())));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Expression s(m.alphabet_size());
      for (std::size_t k = 0; k < m.brownian_dim; ++k) s += m.diffusion[i][k] * m.diffusion[j][k];
      cov[i][j] = s;
      cov[j][i] = s;
    }
  }
  return cov;
}

// Rewrites an expression over the base alphabet as a polynomial over the
// augmented alphabet.
Polynomial to_augmented(const Expression& e, const std::vector<TrigAtom>& atoms,
                        std::size_t base_dim) {
  std::vector<std::size_t> map(e.poly().dim());
  for (std::size_t i = 0; i < base_dim; ++i) map[i] = i;
  for (std::size_t k = 0; k < e.atoms().size(); ++k) {
    std::size_t slot = atoms.size();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a] == e.atoms()[k]) slot = a;
    }
    if (slot == atoms.size()) {
      if (e.poly().depends_on(base_dim + k)) {
        throw Error("augment", "internal: trig atom missing from the augmentation table");
      }
      slot = 0;  // unused slot; its exponent is zero everywhere
    }
    map[base_dim + k] = base_dim + slot;
  }
  if (atoms.empty()) {
    // Unused atoms may still be registered; drop them.
    Polynomial p(base_dim);
    for (const auto& [alpha, c] : e.poly().terms()) {
      MultiIndex beta(base_dim);
      for (std::size_t i = 0; i < base_dim; ++i) beta[i] = alpha[i];
      p.add_term(beta, c);
    }
    return p;
  }
  return e.poly().remapped(base_dim + atoms.size(), map);
}

void check_supported(const SdeModel& m) {
  for (const Expression* e : dynamics_entries(m)) {
    for (std::size_t k = 0; k < e->atoms().size(); ++k) {
      const TrigAtom& a = e->atoms()[k];
      if (!e->poly().depends_on(e->base_dim() + k)) continue;
      if (a.frequency <= 0 || a.argument.is_zero() || a.argument.size() != m.alphabet_size()) {
        throw Error("augment", "unsupported dynamics: term '" + a.to_string(m.variables) +
                                   "' is not a sinusoid of a state monomial");
      }
    }
  }
}

}  // namespace

std::vector<std::vector<Polynomial>> AugmentedModel::covariance() const {
  const std::size_t n = dim();
  std::vector<std::vector<Polynomial>> cov(n, std::vector<Polynomial>(n, Polynomial(n)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Polynomial s(n);
      for (std::size_t k = 0; k < brownian_dim; ++k) s += diffusion[i][k] * diffusion[j][k];
      cov[i][j] = s;
      cov[j][i] = s;
    }
  }
  return cov;
}

SdeModel augment_time(const SdeModel& m) {
  m.validate();
  if (m.time_is_state) throw Error("augment", "model is already time-augmented");
  SdeModel r = m;
  const std::size_t dim = m.alphabet_size();
  r.time_is_state = true;
  r.drift.push_back(Expression::constant(dim, 1));
  r.diffusion.push_back(std::vector<Expression>(m.brownian_dim, Expression(dim)));
  r.x0.push_back(0.0);
  const Polynomial t = Polynomial::variable(dim, m.time_index());
  r.safe_polys.push_back(Polynomial::constant(dim, m.horizon) - t);
  r.support_polys.push_back(t);
  return r;
}

std::vector<TrigAtom> collect_trig_atoms(const SdeModel& m) {
  std::vector<Mode> sine_modes;
  std::vector<Mode> cosine_modes;
  auto contains = [](const std::vector<Mode>& v, const Mode& x) {
    for (const auto& y : v)
      if (y == x) return true;
    return false;
  };
  for (const Expression* e : dynamics_entries(m)) {
    for (std::size_t k = 0; k < e->atoms().size(); ++k) {
      if (!e->poly().depends_on(e->base_dim() + k)) continue;
      const TrigAtom& a = e->atoms()[k];
      Mode mode{a.frequency, a.argument};
      auto& bucket = a.kind == TrigAtom::Kind::kSine ? sine_modes : cosine_modes;
      if (!contains(bucket, mode)) bucket.push_back(mode);
    }
  }
  std::vector<Mode> modes = sine_modes;
  for (const auto& mode : cosine_modes)
    if (!contains(modes, mode)) modes.push_back(mode);
  std::vector<TrigAtom> atoms;
  for (const auto& mode : modes) atoms.push_back({TrigAtom::Kind::kSine, mode.frequency, mode.argument});
  for (const auto& mode : modes) atoms.push_back({TrigAtom::Kind::kCosine, mode.frequency, mode.argument});
  return atoms;
}

AugmentedModel augment_sinusoids(const SdeModel& input) {
  const SdeModel m = input.time_is_state ? input : augment_time(input);
  m.validate();
  check_supported(m);
  const std::vector<TrigAtom> atoms = collect_trig_atoms(m);
  const std::size_t base = m.alphabet_size();
  const std::size_t dim = base + atoms.size();

  AugmentedModel r;
  r.variables = m.variables;
  for (const auto& a : atoms) r.variables.push_back(a.to_string(m.variables));
  r.base_dim = base;
  r.brownian_dim = m.brownian_dim;
  r.atoms = atoms;
  r.horizon = m.horizon;
  r.x0 = m.x0;

  for (const auto& e : m.drift) r.drift.push_back(to_augmented(e, atoms, base));
  for (const auto& row : m.diffusion) {
    std::vector<Polynomial> out;
    for (const auto& e : row) out.push_back(to_augmented(e, atoms, base));
    r.diffusion.push_back(std::move(out));
  }

  const auto cov = expression_covariance(m);
  const std::vector<double> x0 = m.x0;
  for (const TrigAtom& a : atoms) {
    const Expression f = Expression::atom(base, a);
    std::vector<Expression> grad;
    for (std::size_t i = 0; i < base; ++i) grad.push_back(f.differentiate(i));
    // Ito: dF = (sum_i h_i F_i + 1/2 sum_ij (sigma sigma^T)_ij F_ij) dt + sum_i F_i sigma_i dB
    Expression drift(base);
    for (std::size_t i = 0; i < base; ++i) {
      if (grad[i].is_zero()) continue;
      drift += m.drift[i] * grad[i];
      for (std::size_t j = 0; j < base; ++j) {
        if (cov[i][j].is_zero()) continue;
        drift += cov[i][j] * grad[i].differentiate(j) * Rational(1, 2);
      }
    }
    r.drift.push_back(to_augmented(drift, atoms, base));
    std::vector<Polynomial> row;
    for (std::size_t k = 0; k < m.brownian_dim; ++k) {
      Expression s(base);
      for (std::size_t i = 0; i < base; ++i) {
        if (!grad[i].is_zero()) s += grad[i] * m.diffusion[i][k];
      }
      row.push_back(to_augmented(s, atoms, base));
    }
    r.diffusion.push_back(std::move(row));
    r.x0.push_back(a.evaluate(x0));
  }

  std::vector<std::size_t> embed(base);
  for (std::size_t i = 0; i < base; ++i) embed[i] = i;
  for (const auto& q : m.safe_polys) r.safe_polys.push_back(q.remapped(dim, embed));
  for (const auto& q : m.support_polys) r.support_polys.push_back(q.remapped(dim, embed));
  const std::size_t modes = atoms.size() / 2;
  const Polynomial one = Polynomial::constant(dim, 1);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Polynomial x = Polynomial::variable(dim, base + k);
    r.support_polys.push_back(one - x * x);
  }
  for (std::size_t k = 0; k < modes; ++k) {
    const Polynomial s = Polynomial::variable(dim, base + k);
    const Polynomial c = Polynomial::variable(dim, base + modes + k);
    r.support_identities.push_back(s * s + c * c - one);
  }
  return r;
}

ClosureReport check_closure(const SdeModel& m) {
  for (std::size_t i = 0; i < m.drift.size(); ++i) {
    if (!m.drift[i].is_polynomial()) {
      return {false, "drift[" + std::to_string(i) + "] = " + m.drift[i].to_string(m.variables)};
    }
  }
  const auto cov = expression_covariance(m);
  for (std::size_t i = 0; i < cov.size(); ++i) {
    for (std::size_t j = 0; j < cov.size(); ++j) {
      if (!cov[i][j].is_polynomial()) {
        return {false, "(sigma*sigma^T)[" + std::to_string(i) + "][" + std::to_string(j) +
                           "] = " + cov[i][j].to_string(m.variables)};
      }
    }
  }
  return {true, ""};
}

ClosureReport check_closure(const AugmentedModel& m) {
  // Entries are stored as polynomials over the augmented alphabet, so the
  // check reduces to shape consistency.
  const std::size_t n = m.dim();
  for (std::size_t i = 0; i < m.drift.size(); ++i) {
    if (m.drift[i].dim() != n) return {false, "drift[" + std::to_string(i) + "] has the wrong alphabet"};
  }
  if (m.drift.size() != n || m.diffusion.size() != n) return {false, "dynamics have the wrong shape"};
  return {true, ""};
}

std::string format_augmented(const AugmentedModel& m) {
  std::ostringstream os;
  os << "state: [";
  for (std::size_t i = 0; i < m.dim(); ++i) os << (i ? ", " : "") << m.variables[i];
  os << "]\n";
  os << "dimension: " << m.dim() << "\n";
  os << "drift:\n";
  for (std::size_t i = 0; i < m.dim(); ++i) {
    os << "  d" << m.variables[i] << ": " << m.drift[i].to_string(m.variables) << "\n";
  }
  os << "diffusion:\n";
  for (std::size_t i = 0; i < m.dim(); ++i) {
    os << "  d" << m.variables[i] << ": [";
    for (std::size_t k = 0; k < m.brownian_dim; ++k) {
      os << (k ? ", " : "") << m.diffusion[i][k].to_string(m.variables);
    }
    os << "]\n";
  }
  os << "x0: [";
  for (std::size_t i = 0; i < m.x0.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", m.x0[i]);
    os << (i ? ", " : "") << buf;
  }
  os << "]\n";
  os << "safe set:\n";
  for (const auto& q : m.safe_polys) os << "  " << q.to_string(m.variables) << " >= 0\n";
  os << "support:\n";
  for (const auto& q : m.support_polys) os << "  " << q.to_string(m.variables) << " >= 0\n";
  for (const auto& q : m.support_identities) os << "  " << q.to_string(m.variables) << " = 0\n";
  return os.str();
}

}  // namespace exitmoment::augment
