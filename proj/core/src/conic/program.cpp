#include "exitmoment/conic/program.hpp"

#include "exitmoment/error.hpp"

namespace exitmoment::conic {

Eigen::MatrixXd PsdBlock::materialize(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (const Entry& e : entries) {
    m(e.row, e.col) += e.coeff * x[e.var];
  }
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < j; ++i) m(j, i) = m(i, j);
  }
  return m;
}

int ConicProgram::psd_total_dimension() const {
  int total = 0;
  for (const auto& b : blocks) total += b.size;
  return total;
}

void ConicProgram::validate() const {
  const auto fail = [](const std::string& msg) { throw Error("conic", msg); };
  if (objective.size() != num_vars) fail("objective has the wrong length");
  if (equalities.cols() != num_vars && equalities.rows() > 0) fail("equality matrix has the wrong width");
  if (equalities.rows() != rhs.size()) fail("equality matrix and rhs disagree");
  for (const auto& b : blocks) {
    if (b.size <= 0) fail("PSD block '" + b.name + "' has no rows");
    for (const auto& e : b.entries) {
      if (e.row < 0 || e.col < e.row || e.col >= b.size) fail("PSD block '" + b.name + "' entry outside the upper triangle");
      if (e.var < 0 || e.var >= num_vars) fail("PSD block '" + b.name + "' references an unknown variable");
    }
  }
}

}  // namespace exitmoment::conic
