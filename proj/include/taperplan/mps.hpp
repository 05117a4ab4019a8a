#pragma once

// MPS import/export for handing a model to an external solver and taking its
// answer back. Files use free-format sections with short generated names
// (eight characters or fewer, as classic tools expect); a companion name map
// records the original identifiers.

#include <iosfwd>
#include <string>
#include <vector>

#include "taperplan/milp.hpp"

namespace taperplan::mps {

// Deterministic short names: column 0 -> "C0000001", row 0 -> "R0000001".
std::string mangled_column_name(int index);
std::string mangled_row_name(int index);

// Writes the model as free MPS: ROWS, COLUMNS (with integrality markers),
// RHS, RANGES for two-sided rows, and explicit BOUNDS for every column.
// Values are printed with round-trip precision.
void write_mps(const milp::SparseMilp& model, std::ostream& out);

// One line per identifier, "short original", columns first then rows.
void write_name_map(const milp::SparseMilp& model, std::ostream& out);

// Parses what write_mps produces, plus the common bound types (LO, UP, FX,
// FR, MI, PL, BV) and ranges on any row sense. Throws ParseError on
// malformed or unsupported input.
milp::SparseMilp read_mps(std::istream& in);

// Reads an assignment per line ("name value"; '#' starts a comment line) and
// maps names onto the model's columns, accepting both original and short
// names. Unmentioned columns default to zero. An unknown name or a file
// with no assignments at all is an error.
std::vector<double> read_external_solution(std::istream& in,
                                           const milp::SparseMilp& model);

}  // namespace taperplan::mps
