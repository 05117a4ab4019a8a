#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace taperplan::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct RowEntry {
  int col = 0;
  double value = 0.0;
};

// Mixed-integer linear program in sparse row form:
//   minimize  c.x   subject to  row_lower <= A x <= row_upper,
//                               col_lower <= x <= col_upper,
//                               x_j integral for flagged columns.
struct SparseMilp {
  struct Row {
    std::string name;
    double lower = -kInf;
    double upper = kInf;
    std::vector<RowEntry> entries;
  };

  std::vector<std::string> col_names;
  std::vector<double> col_lower, col_upper, objective;
  std::vector<std::uint8_t> integral;
  std::vector<Row> rows;

  int add_column(std::string name, double lb, double ub, double obj,
                 bool is_integral = false);
  int add_row(std::string name, double lb, double ub,
              std::vector<RowEntry> entries);

  // Drops the given rows (duplicates tolerated) preserving the order of the
  // survivors.  Returns old-index -> new-index, -1 for removed rows.
  std::vector<int> remove_rows(const std::vector<int>& row_ids);

  int n_cols() const { return static_cast<int>(col_names.size()); }
  int n_rows() const { return static_cast<int>(rows.size()); }
  int n_integral() const;

  // Structural problems (bad indices, duplicate names, unbounded integral
  // columns, inverted bounds), one message each.
  std::vector<std::string> validate() const;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, Limit };

const char* to_string(SolveStatus s);

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;     // per structural column
  std::vector<double> row_duals;  // per row, sign convention of a minimizer
  double objective = 0.0;
  long iterations = 0;
};

struct MilpOptions {
  double gap_tol = 0.0;         // stop once (incumbent - bound)/|incumbent| <= this
  double time_limit_s = 3600.0;
  long node_limit = std::numeric_limits<long>::max();
  double integrality_tol = 1e-6;
  // Worker threads for node evaluation.  The final objective and status do
  // not depend on the value; keep the default fixed for reproducible trees.
  int threads = 1;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
  double best_bound = -kInf;
  double gap = std::numeric_limits<double>::infinity();
  long nodes = 0;
  double wall_time_s = 0.0;
};

// Simplex solve of the continuous relaxation (integrality ignored).
LpSolution solve_lp(const SparseMilp& model);

// Exact branch-and-bound over the integral columns.
MilpSolution solve_milp(const SparseMilp& model, const MilpOptions& opt = {});

// Independent oracle: enumerate every assignment of the free integral
// columns (after an interval-arithmetic feasibility filter) and solve the
// continuous remainder for each.  Refuses more than max_binaries free
// integral columns; max_binaries itself is capped at 20.
MilpSolution brute_force(const SparseMilp& model, int max_binaries = 20);

}  // namespace taperplan::milp
