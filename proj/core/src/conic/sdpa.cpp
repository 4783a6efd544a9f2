#include "exitmoment/conic/sdpa.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <vector>

#include "exitmoment/error.hpp"

namespace exitmoment::conic {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_sdpa(const ConicProgram& p, std::ostream& out) {
  p.validate();
  const int meq = p.num_equalities();
  const double sign = p.sense == Sense::kMaximize ? -1.0 : 1.0;
  const int nblocks = static_cast<int>(p.blocks.size()) + (meq > 0 ? 1 : 0);
  out << "\"exitmoment conic program\n";
  out << "* sense " << (p.sense == Sense::kMaximize ? "maximize (objective negated)" : "minimize") << "\n";
  out << p.num_vars << "\n" << nblocks << "\n";
  for (std::size_t k = 0; k < p.blocks.size(); ++k) out << (k ? " " : "") << p.blocks[k].size;
  if (meq > 0) out << (p.blocks.empty() ? "" : " ") << -2 * meq;
  out << "\n";
  for (int v = 0; v < p.num_vars; ++v) out << (v ? " " : "") << fmt(sign * p.objective[v] + 0.0);
  out << "\n";

  // Matrix 0 holds the constants; matrix v + 1 belongs to variable v.
  using Key = std::tuple<int, int, int, int>;  // matno, blkno, i, j
  std::map<Key, double> entries;
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    for (const auto& e : p.blocks[k].entries) {
      entries[{e.var + 1, static_cast<int>(k) + 1, e.row + 1, e.col + 1}] += e.coeff;
    }
  }
  const int eq_block = static_cast<int>(p.blocks.size()) + 1;
  for (int r = 0; r < meq; ++r) {
    if (p.rhs[r] != 0) {
      entries[{0, eq_block, 2 * r + 1, 2 * r + 1}] += p.rhs[r];
      entries[{0, eq_block, 2 * r + 2, 2 * r + 2}] += -p.rhs[r];
    }
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.equalities, r); it; ++it) {
      const int var = static_cast<int>(it.col()) + 1;
      entries[{var, eq_block, 2 * r + 1, 2 * r + 1}] += it.value();
      entries[{var, eq_block, 2 * r + 2, 2 * r + 2}] += -it.value();
    }
  }
  for (const auto& [key, value] : entries) {
    if (value == 0) continue;
    const auto& [mat, blk, i, j] = key;
    out << mat << " " << blk << " " << i << " " << j << " " << fmt(value) << "\n";
  }
}

void export_sdpa(const ConicProgram& program, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("conic", "cannot open '" + path + "' for writing");
  write_sdpa(program, out);
  if (!out) throw Error("conic", "failed writing '" + path + "'");
}

ConicProgram read_sdpa(std::istream& in) {
  const auto fail = [](const std::string& msg) { throw Error("conic", "SDPA parse error: " + msg); };
  std::string line;
  std::vector<std::string> data_lines;
  Sense sense = Sense::kMinimize;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '"' || line[0] == '*') {
      if (line.find("sense maximize") != std::string::npos) sense = Sense::kMaximize;
      continue;
    }
    data_lines.push_back(line);
  }
  std::istringstream body;
  std::string joined;
  for (auto& l : data_lines) {
    for (char& ch : l)
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    joined += l + "\n";
  }
  body.str(joined);
  int m = 0, nblocks = 0;
  if (!(body >> m >> nblocks) || m < 0 || nblocks < 0) fail("bad header");
  std::vector<int> sizes(nblocks);
  for (auto& s : sizes)
    if (!(body >> s) || s == 0) fail("bad block structure");
  ConicProgram p;
  p.num_vars = m;
  p.sense = sense;
  p.objective.resize(m);
  const double sign = sense == Sense::kMaximize ? -1.0 : 1.0;
  for (int v = 0; v < m; ++v) {
    double c;
    if (!(body >> c)) fail("bad objective vector");
    p.objective[v] = sign * c + 0.0;
  }
  int eq_block = -1;
  for (int k = 0; k < nblocks; ++k) {
    if (sizes[k] < 0) {
      if (eq_block >= 0 || -sizes[k] % 2 != 0) fail("unsupported diagonal block layout");
      eq_block = k;
    }
  }
  for (int k = 0; k < nblocks; ++k) {
    if (k == eq_block) continue;
    PsdBlock b;
    b.name = "block" + std::to_string(k + 1);
    b.size = sizes[k];
    p.blocks.push_back(std::move(b));
  }
  const int meq = eq_block >= 0 ? -sizes[eq_block] / 2 : 0;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(meq);
  int mat, blk, i, j;
  double value;
  while (body >> mat >> blk >> i >> j >> value) {
    if (blk < 1 || blk > nblocks || mat < 0 || mat > m) fail("entry index out of range");
    if (blk - 1 == eq_block) {
      if (i != j) fail("off-diagonal entry in a diagonal block");
      // Only the first row of each pair carries the data.
      if ((i - 1) % 2 != 0) continue;
      const int r = (i - 1) / 2;
      if (mat == 0) {
        rhs[r] = value;
      } else {
        trips.emplace_back(r, mat - 1, value);
      }
      continue;
    }
    if (mat == 0) fail("constant terms in PSD blocks are not supported");
    const int idx = blk - 1 - (eq_block >= 0 && blk - 1 > eq_block ? 1 : 0);
    PsdBlock& b = p.blocks[idx];
    int r = i - 1, c = j - 1;
    if (r > c) std::swap(r, c);
    if (c >= b.size) fail("entry outside block");
    b.entries.push_back({r, c, mat - 1, value});
  }
  if (!body.eof()) fail("trailing garbage");
  p.equalities.resize(meq, m);
  p.equalities.setFromTriplets(trips.begin(), trips.end());
  p.equalities.makeCompressed();
  p.rhs = rhs;
  return p;
}

ConicProgram import_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("conic", "cannot open '" + path + "'");
  return read_sdpa(in);
}

}  // namespace exitmoment::conic
