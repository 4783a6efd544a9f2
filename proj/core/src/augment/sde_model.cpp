#include "exitmoment/augment/sde_model.hpp"

#include "exitmoment/error.hpp"
#include "exitmoment/expr/parser.hpp"

namespace exitmoment::augment {

void SdeModel::validate() const {
  const auto fail = [](const std::string& msg) { throw Error("augment", msg); };
  if (variables.empty() || variables.back() != "t") {
    fail("model alphabet must end with the time variable 't'");
  }
  const std::size_t n = state_dim();
  if (n == 0) fail("model has no state variables");
  if (drift.size() != n) fail("drift has " + std::to_string(drift.size()) + " entries, expected " +
                              std::to_string(n));
  if (diffusion.size() != n) fail("diffusion must have one row per state variable");
  if (brownian_dim == 0) fail("Brownian dimension must be positive");
  for (const auto& row : diffusion) {
    if (row.size() != brownian_dim) fail("diffusion rows must have brownian_dim entries");
    for (const auto& e : row) {
      if (e.base_dim() != alphabet_size()) fail("diffusion entry over the wrong alphabet");
    }
  }
  for (const auto& e : drift) {
    if (e.base_dim() != alphabet_size()) fail("drift entry over the wrong alphabet");
  }
  if (x0.size() != n) fail("x0 must have one entry per state variable");
  if (horizon <= 0) fail("time horizon must be positive");
  for (const auto& q : safe_polys) {
    if (q.dim() != alphabet_size()) fail("safe-set polynomial over the wrong alphabet");
  }
  for (const auto& q : support_polys) {
    if (q.dim() != alphabet_size()) fail("support polynomial over the wrong alphabet");
  }
}

std::vector<double> SdeModel::initial_point() const {
  std::vector<double> p = x0;
  if (!time_is_state) p.push_back(0.0);
  return p;
}

SdeModel make_model(const std::vector<std::string>& state_names,
                    const std::vector<std::string>& drift,
                    const std::vector<std::vector<std::string>>& diffusion,
                    const std::vector<double>& x0, const expr::Rational& horizon,
                    const std::vector<std::string>& safe_polys) {
  SdeModel m;
  m.variables = state_names;
  m.variables.push_back("t");
  m.brownian_dim = diffusion.empty() ? 0 : diffusion.front().size();
  for (const auto& d : drift) m.drift.push_back(expr::parse_expression(d, m.variables));
  for (const auto& row : diffusion) {
    std::vector<expr::Expression> r;
    for (const auto& s : row) r.push_back(expr::parse_expression(s, m.variables));
    m.diffusion.push_back(std::move(r));
  }
  m.x0 = x0;
  m.horizon = horizon;
  for (const auto& q : safe_polys) m.safe_polys.push_back(expr::parse_polynomial(q, m.variables));
  m.validate();
  return m;
}

}  // namespace exitmoment::augment
