#pragma once

#include <iosfwd>
#include <string>

#include "exitmoment/conic/program.hpp"

namespace exitmoment::conic {

/// Writes the program in sparse SDPA format (.dat-s).
///
/// Layout: one SDPA block per PSD block, in program order, followed (when
/// there are equalities) by a diagonal block of size 2 * num_equalities in
/// which equality r becomes the pair of rows 2r (a_r'x - rhs_r >= 0) and
/// 2r + 1 (rhs_r - a_r'x >= 0). SDPA minimizes, so a maximization
/// objective is written negated; a comment line records the sense. Entries
/// are 1-indexed, upper triangle only, and printed with 17 significant
/// digits so the file round-trips exactly.
void write_sdpa(const ConicProgram& program, std::ostream& out);
void export_sdpa(const ConicProgram& program, const std::string& path);

/// Reads a file produced by write_sdpa back into a ConicProgram.
ConicProgram read_sdpa(std::istream& in);
ConicProgram import_sdpa(const std::string& path);

}  // namespace exitmoment::conic
