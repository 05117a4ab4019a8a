#pragma once

#include <vector>

#include "taperplan/milp.hpp"

namespace taperplan::milp {

// Bounded-variable primal simplex over one immutable model.  The sparse
// matrix is prepared once; solve() may be called repeatedly with different
// column bounds (branch-and-bound nodes).  The first solve starts from the
// all-logical basis; later solves restart from the previous optimal basis,
// which typically needs only a few pivots after a small bound change.  A
// dense basis inverse is maintained with rank-one pivot updates and rebuilt
// from scratch when numerics degrade or on a fixed warm-solve cadence.
class SimplexSolver {
 public:
  explicit SimplexSolver(const SparseMilp& model);

  struct Result {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;      // structural values
    std::vector<double> duals;  // per row
    long iterations = 0;
  };

  // lb/ub: per-structural-column bounds, nullptr for the model's own.
  Result solve(const double* lb = nullptr, const double* ub = nullptr);

  long total_iterations() const { return total_iterations_; }

 private:
  enum NbStatus : signed char { kAtLower = 0, kAtUpper = 1, kFree = 2 };

  int n_ = 0;      // structural columns
  int m_ = 0;      // rows
  int total_ = 0;  // n_ + m_ variables including logicals

  // structural matrix, both orientations
  std::vector<int> cs_ptr_, cs_row_;
  std::vector<double> cs_val_;
  std::vector<int> rs_ptr_, rs_col_;
  std::vector<double> rs_val_;
  std::vector<double> cost_;       // structural objective
  std::vector<double> row_lb_, row_ub_;
  double cost_scale_ = 1.0;        // 1 + max |c|, for dual tolerances

  // per-solve state
  std::vector<double> lb_, ub_;    // size total_
  std::vector<int> basis_;         // size m_, variable in each basis slot
  std::vector<int> basis_pos_;     // size total_, slot or -1
  std::vector<signed char> nb_status_;
  std::vector<double> binv_;       // m_*m_, column-major
  std::vector<double> xb_;         // basic values
  std::vector<double> d_;          // reduced costs (phase-2, maintained)
  std::vector<signed char> fstate_;  // basic feasibility: -1 below, 0 in, 1 above
  std::vector<double> alpha_;      // ftran scratch
  std::vector<double> pivot_row_;  // btran-row scratch over all variables
  std::vector<double> work_r_;     // rhs accumulation scratch
  std::vector<double> work_n_;     // structural-sized scratch
  std::vector<int> viol_list_;     // infeasible basic slots, phase-1 pricing

  long total_iterations_ = 0;
  int refactor_count_ = 0;
  bool has_basis_ = false;   // a previous solve left a reusable basis
  int warm_solves_ = 0;      // warm solves since the inverse was rebuilt

  double value_of(int j) const;
  void set_initial_point();
  void normalize_nonbasic();
  void compute_xb();
  void ftran(int var, std::vector<double>& out) const;
  int classify_basics();           // fills fstate_, returns violation count
  void price_phase2();             // full reduced-cost refresh
  void update_duals_after_pivot(int slot, int entering, double pivot);
  void apply_pivot(int slot, int entering, const std::vector<double>& alpha);
  bool refactorize();              // rebuild binv_ from basis_; false if singular
};

}  // namespace taperplan::milp
