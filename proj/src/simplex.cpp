#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "taperplan/errors.hpp"

namespace taperplan::milp {

namespace {

constexpr double kFeasTol = 1e-7;     // bound / row feasibility
constexpr double kPivotTol = 1e-11;   // smallest |alpha| eligible to block
constexpr double kGoodPivot = 1e-7;   // preferred pivot magnitude among ties
constexpr double kDegenStep = 1e-10;  // step size counted as degenerate
constexpr int kBlandTrigger = 40;     // degenerate steps before intervening
constexpr int kDualRefresh = 256;     // pivots between full dual refreshes
constexpr double kPert = 1e-8;        // stall-breaking bound perturbation

inline bool finite(double v) { return std::isfinite(v); }

}  // namespace

SimplexSolver::SimplexSolver(const SparseMilp& model) {
  n_ = model.n_cols();
  m_ = model.n_rows();
  total_ = n_ + m_;

  cost_ = model.objective;
  cost_scale_ = 1.0;
  for (double c : cost_) cost_scale_ = std::max(cost_scale_, std::fabs(c));

  row_lb_.resize(m_);
  row_ub_.resize(m_);
  rs_ptr_.assign(m_ + 1, 0);
  std::size_t nnz = 0;
  for (int i = 0; i < m_; ++i) {
    row_lb_[i] = model.rows[i].lower;
    row_ub_[i] = model.rows[i].upper;
    nnz += model.rows[i].entries.size();
    rs_ptr_[i + 1] = static_cast<int>(nnz);
  }
  rs_col_.resize(nnz);
  rs_val_.resize(nnz);
  std::vector<int> col_count(n_, 0);
  {
    std::size_t k = 0;
    for (int i = 0; i < m_; ++i) {
      for (const RowEntry& e : model.rows[i].entries) {
        rs_col_[k] = e.col;
        rs_val_[k] = e.value;
        ++col_count[e.col];
        ++k;
      }
    }
  }
  cs_ptr_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) cs_ptr_[j + 1] = cs_ptr_[j] + col_count[j];
  cs_row_.resize(nnz);
  cs_val_.resize(nnz);
  {
    std::vector<int> fill(cs_ptr_.begin(), cs_ptr_.end() - 1);
    for (int i = 0; i < m_; ++i) {
      for (int k = rs_ptr_[i]; k < rs_ptr_[i + 1]; ++k) {
        int j = rs_col_[k];
        cs_row_[fill[j]] = i;
        cs_val_[fill[j]] = rs_val_[k];
        ++fill[j];
      }
    }
  }
}

double SimplexSolver::value_of(int j) const {
  int pos = basis_pos_[j];
  if (pos >= 0) return xb_[pos];
  switch (nb_status_[j]) {
    case kAtLower: return lb_[j];
    case kAtUpper: return ub_[j];
    default: return 0.0;
  }
}

void SimplexSolver::set_initial_point() {
  basis_.resize(m_);
  basis_pos_.assign(total_, -1);
  nb_status_.assign(total_, kAtLower);
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    basis_pos_[n_ + i] = i;
  }
  for (int j = 0; j < n_; ++j) {
    const double lo = lb_[j], up = ub_[j];
    if (finite(lo) && finite(up))
      nb_status_[j] = std::fabs(lo) <= std::fabs(up) ? kAtLower : kAtUpper;
    else if (finite(lo))
      nb_status_[j] = kAtLower;
    else if (finite(up))
      nb_status_[j] = kAtUpper;
    else
      nb_status_[j] = kFree;
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i)
    binv_[static_cast<std::size_t>(i) * m_ + i] = -1.0;  // logicals carry -1
  compute_xb();
}

// After a bound change, a retained nonbasic status may name a bound that no
// longer exists; move such variables to a bound that does.
void SimplexSolver::normalize_nonbasic() {
  for (int j = 0; j < total_; ++j) {
    if (basis_pos_[j] >= 0) continue;
    const bool lf = finite(lb_[j]);
    const bool uf = finite(ub_[j]);
    switch (nb_status_[j]) {
      case kAtLower:
        if (!lf) nb_status_[j] = uf ? kAtUpper : kFree;
        break;
      case kAtUpper:
        if (!uf) nb_status_[j] = lf ? kAtLower : kFree;
        break;
      default:
        if (lf && uf)
          nb_status_[j] = std::fabs(lb_[j]) <= std::fabs(ub_[j]) ? kAtLower
                                                                 : kAtUpper;
        else if (lf)
          nb_status_[j] = kAtLower;
        else if (uf)
          nb_status_[j] = kAtUpper;
        break;
    }
  }
}

// xb = -Binv * (sum of nonbasic columns times their values)
void SimplexSolver::compute_xb() {
  work_r_.assign(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (basis_pos_[j] >= 0) continue;
    const double v = value_of(j);
    if (v == 0.0) continue;
    for (int k = cs_ptr_[j]; k < cs_ptr_[j + 1]; ++k)
      work_r_[cs_row_[k]] += cs_val_[k] * v;
  }
  for (int i = 0; i < m_; ++i) {
    int s = n_ + i;
    if (basis_pos_[s] >= 0) continue;
    const double v = value_of(s);
    if (v != 0.0) work_r_[i] -= v;
  }
  xb_.assign(m_, 0.0);
  for (int k = 0; k < m_; ++k) {
    const double r = work_r_[k];
    if (r == 0.0) continue;
    const double* col = binv_.data() + static_cast<std::size_t>(k) * m_;
    for (int i = 0; i < m_; ++i) xb_[i] -= r * col[i];
  }
}

void SimplexSolver::ftran(int var, std::vector<double>& out) const {
  out.assign(m_, 0.0);
  if (var < n_) {
    for (int k = cs_ptr_[var]; k < cs_ptr_[var + 1]; ++k) {
      const double v = cs_val_[k];
      const double* col = binv_.data() + static_cast<std::size_t>(cs_row_[k]) * m_;
      for (int i = 0; i < m_; ++i) out[i] += v * col[i];
    }
  } else {
    const double* col =
        binv_.data() + static_cast<std::size_t>(var - n_) * m_;
    for (int i = 0; i < m_; ++i) out[i] -= col[i];
  }
}

int SimplexSolver::classify_basics() {
  fstate_.assign(m_, 0);
  int viol = 0;
  for (int i = 0; i < m_; ++i) {
    const int v = basis_[i];
    if (xb_[i] < lb_[v] - kFeasTol) {
      fstate_[i] = -1;
      ++viol;
    } else if (xb_[i] > ub_[v] + kFeasTol) {
      fstate_[i] = 1;
      ++viol;
    }
  }
  return viol;
}

void SimplexSolver::price_phase2() {
  // y = c_B' * Binv, then reduced costs for every variable
  work_r_.assign(m_, 0.0);
  std::vector<double> cb(m_, 0.0);
  bool any = false;
  for (int i = 0; i < m_; ++i) {
    if (basis_[i] < n_ && cost_[basis_[i]] != 0.0) {
      cb[i] = cost_[basis_[i]];
      any = true;
    }
  }
  if (any) {
    for (int k = 0; k < m_; ++k) {
      const double* col = binv_.data() + static_cast<std::size_t>(k) * m_;
      double acc = 0.0;
      for (int i = 0; i < m_; ++i) acc += col[i] * cb[i];
      work_r_[k] = acc;
    }
  }
  d_.assign(total_, 0.0);
  for (int j = 0; j < n_; ++j) {
    double acc = cost_[j];
    for (int k = cs_ptr_[j]; k < cs_ptr_[j + 1]; ++k)
      acc -= work_r_[cs_row_[k]] * cs_val_[k];
    d_[j] = acc;
  }
  for (int i = 0; i < m_; ++i) d_[n_ + i] = work_r_[i];
  for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
}

// Incremental reduced-cost update; pivot_row_ must already hold row `slot`
// of the pre-pivot Binv.
void SimplexSolver::update_duals_after_pivot(int slot, int entering,
                                             double pivot) {
  (void)slot;
  const double ratio = d_[entering] / pivot;
  if (ratio != 0.0) {
    // z = pivot_row * A for structurals, -pivot_row for logicals
    std::vector<double>& z = work_n_;
    z.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double r = pivot_row_[i];
      if (r == 0.0) continue;
      for (int k = rs_ptr_[i]; k < rs_ptr_[i + 1]; ++k)
        z[rs_col_[k]] += r * rs_val_[k];
    }
    for (int j = 0; j < n_; ++j) d_[j] -= ratio * z[j];
    for (int i = 0; i < m_; ++i) d_[n_ + i] += ratio * pivot_row_[i];
  }
  d_[entering] = 0.0;
}

// pivot_row_ holds row `slot` of the pre-pivot Binv; alpha is the ftran of
// the entering column.
void SimplexSolver::apply_pivot(int slot, int entering,
                                const std::vector<double>& alpha) {
  const double piv = alpha[slot];
  for (int k = 0; k < m_; ++k) {
    double s = pivot_row_[k];
    if (s == 0.0) continue;
    s /= piv;
    double* col = binv_.data() + static_cast<std::size_t>(k) * m_;
    for (int i = 0; i < m_; ++i) col[i] -= s * alpha[i];
    col[slot] = s;
  }
  basis_pos_[basis_[slot]] = -1;
  basis_[slot] = entering;
  basis_pos_[entering] = slot;
}

bool SimplexSolver::refactorize() {
  ++refactor_count_;
  // Dense basis matrix, row-major for the elimination sweeps.
  std::vector<double> mat(static_cast<std::size_t>(m_) * m_, 0.0);
  std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int k = 0; k < m_; ++k) {
    int var = basis_[k];
    if (var < n_) {
      for (int p = cs_ptr_[var]; p < cs_ptr_[var + 1]; ++p)
        mat[static_cast<std::size_t>(cs_row_[p]) * m_ + k] = cs_val_[p];
    } else {
      mat[static_cast<std::size_t>(var - n_) * m_ + k] = -1.0;
    }
  }
  for (int i = 0; i < m_; ++i)
    inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;

  for (int k = 0; k < m_; ++k) {
    int piv_row = -1;
    double piv_mag = kPivotTol;
    for (int i = k; i < m_; ++i) {
      double mag = std::fabs(mat[static_cast<std::size_t>(i) * m_ + k]);
      if (mag > piv_mag) {
        piv_mag = mag;
        piv_row = i;
      }
    }
    if (piv_row < 0) return false;
    if (piv_row != k) {
      for (int c = 0; c < m_; ++c) {
        std::swap(mat[static_cast<std::size_t>(piv_row) * m_ + c],
                  mat[static_cast<std::size_t>(k) * m_ + c]);
        std::swap(inv[static_cast<std::size_t>(piv_row) * m_ + c],
                  inv[static_cast<std::size_t>(k) * m_ + c]);
      }
    }
    double* mrow = mat.data() + static_cast<std::size_t>(k) * m_;
    double* irow = inv.data() + static_cast<std::size_t>(k) * m_;
    const double scale = 1.0 / mrow[k];
    for (int c = 0; c < m_; ++c) {
      mrow[c] *= scale;
      irow[c] *= scale;
    }
    for (int i = 0; i < m_; ++i) {
      if (i == k) continue;
      double f = mat[static_cast<std::size_t>(i) * m_ + k];
      if (f == 0.0) continue;
      double* mi = mat.data() + static_cast<std::size_t>(i) * m_;
      double* ii = inv.data() + static_cast<std::size_t>(i) * m_;
      for (int c = 0; c < m_; ++c) {
        mi[c] -= f * mrow[c];
        ii[c] -= f * irow[c];
      }
    }
  }
  // transpose into the column-major working copy
  for (int i = 0; i < m_; ++i)
    for (int k = 0; k < m_; ++k)
      binv_[static_cast<std::size_t>(k) * m_ + i] =
          inv[static_cast<std::size_t>(i) * m_ + k];
  compute_xb();
  return true;
}

SimplexSolver::Result SimplexSolver::solve(const double* lbo,
                                           const double* ubo) {
  lb_.resize(total_);
  ub_.resize(total_);
  auto load_exact_bounds = [&] {
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lbo ? lbo[j] : -kInf;
      ub_[j] = ubo ? ubo[j] : kInf;
    }
    for (int i = 0; i < m_; ++i) {
      lb_[n_ + i] = row_lb_[i];
      ub_[n_ + i] = row_ub_[i];
    }
  };
  load_exact_bounds();
  // Anti-stall measure: once the iteration degenerates into zero-length
  // steps, every finite bound is pushed out by a tiny variable-specific
  // amount, which breaks the ratio-test ties feeding the stall.  The exact
  // bounds come back before optimality can be declared.
  bool perturbed = false;
  auto perturb_bounds = [&] {
    for (int j = 0; j < total_; ++j) {
      const unsigned h = static_cast<unsigned>(j) * 2654435761u;
      const double r1 = 0.5 + (h >> 21 & 1023) / 1024.0;
      const double r2 = 0.5 + (h >> 11 & 1023) / 1024.0;
      if (finite(lb_[j])) lb_[j] -= kPert * (1.0 + std::fabs(lb_[j])) * r1;
      if (finite(ub_[j])) ub_[j] += kPert * (1.0 + std::fabs(ub_[j])) * r2;
    }
    perturbed = true;
  };
  if (!has_basis_) {
    set_initial_point();
    has_basis_ = true;
    warm_solves_ = 0;
  } else {
    // warm start from the previous basis; phase 1 repairs what the bound
    // changes broke, which is usually very little
    normalize_nonbasic();
    if (++warm_solves_ >= 512) {
      // periodic exact rebuild keeps drift from compounding across solves;
      // a basis that turns out singular is abandoned for a cold start
      if (!refactorize()) set_initial_point();
      warm_solves_ = 0;
    } else {
      compute_xb();
    }
  }

  alpha_.assign(m_, 0.0);
  pivot_row_.assign(m_, 0.0);
  d_.assign(total_, 0.0);

  const long iter_limit = 20000 + 60L * total_;
  const double d_tol1 = 1e-9;
  const double d_tol2 = 1e-9 * cost_scale_;
  long iters = 0;
  int degen_streak = 0;
  int pert_rounds = 0;
  bool bland = false;
  bool duals_valid = false;
  bool infeas_checked = false;
  int since_refresh = 0;
  int refactors_left = 8;
  int verify_rounds = 0;
  long last_rebuild_iter = -100;

  // A rebuild that exposes a singular recorded basis (a structurally zero
  // pivot got past the drift-affected ratio test earlier) is not fatal:
  // restart from the all-logical basis and let phase 1 redo the work.
  auto rebuild_or_restart = [&] {
    if (!refactorize()) {
      set_initial_point();
      warm_solves_ = 0;
      infeas_checked = false;
    }
    duals_valid = false;
    last_rebuild_iter = iters;
  };

  Result res;

  while (true) {
    if (++iters > iter_limit)
      throw SolveError("simplex exceeded " + std::to_string(iter_limit) +
                       " iterations (" + std::to_string(m_) + " rows, " +
                       std::to_string(n_) + " cols)");

    const int nviol = classify_basics();
    const bool phase1 = nviol > 0;

    // ---- pricing ----
    int enter = -1;
    int sigma = 0;
    double best_score = 0.0;
    if (phase1) {
      duals_valid = false;
      // y restricted to the infeasible basics: y = fstate' * Binv.
      // Column-contiguous accumulation keeps this cache friendly.
      viol_list_.clear();
      for (int i = 0; i < m_; ++i)
        if (fstate_[i] != 0) viol_list_.push_back(i);
      work_r_.assign(m_, 0.0);
      for (int k = 0; k < m_; ++k) {
        const double* col = binv_.data() + static_cast<std::size_t>(k) * m_;
        double acc = 0.0;
        for (int i : viol_list_) acc += fstate_[i] * col[i];
        work_r_[k] = acc;
      }
      for (int j = 0; j < total_ && !(bland && enter >= 0); ++j) {
        if (basis_pos_[j] >= 0) continue;
        if (!(ub_[j] - lb_[j] > 0.0)) continue;  // fixed never enters
        double dj;
        if (j < n_) {
          double acc = 0.0;
          for (int k = cs_ptr_[j]; k < cs_ptr_[j + 1]; ++k)
            acc += work_r_[cs_row_[k]] * cs_val_[k];
          dj = -acc;
        } else {
          dj = work_r_[j - n_];
        }
        int sig = 0;
        if (nb_status_[j] == kAtLower && dj < -d_tol1) sig = 1;
        else if (nb_status_[j] == kAtUpper && dj > d_tol1) sig = -1;
        else if (nb_status_[j] == kFree && std::fabs(dj) > d_tol1)
          sig = dj < 0.0 ? 1 : -1;
        if (sig == 0) continue;
        const double score = std::fabs(dj);
        if (bland) { enter = j; sigma = sig; break; }
        if (score > best_score) {
          best_score = score;
          enter = j;
          sigma = sig;
        }
      }
      if (enter < 0) {
        // No way to reduce infeasibility. Flush accumulated drift once and
        // re-classify before concluding; declaring infeasible is final.
        if (!infeas_checked) {
          infeas_checked = true;
          compute_xb();
          continue;
        }
        res.status = SolveStatus::Infeasible;
        break;
      }
    } else {
      if (!duals_valid || since_refresh >= kDualRefresh) {
        price_phase2();
        duals_valid = true;
        since_refresh = 0;
      }
      for (int j = 0; j < total_; ++j) {
        if (basis_pos_[j] >= 0) continue;
        if (!(ub_[j] - lb_[j] > 0.0)) continue;
        const double dj = d_[j];
        int sig = 0;
        if (nb_status_[j] == kAtLower && dj < -d_tol2) sig = 1;
        else if (nb_status_[j] == kAtUpper && dj > d_tol2) sig = -1;
        else if (nb_status_[j] == kFree && std::fabs(dj) > d_tol2)
          sig = dj < 0.0 ? 1 : -1;
        if (sig == 0) continue;
        if (bland) { enter = j; sigma = sig; break; }
        const double score = std::fabs(dj);
        if (score > best_score) {
          best_score = score;
          enter = j;
          sigma = sig;
        }
      }
      if (enter < 0) {
        // Only accept optimality off freshly recomputed reduced costs;
        // the incrementally maintained ones drift.
        if (since_refresh != 0) {
          price_phase2();
          since_refresh = 0;
          continue;
        }
        if (perturbed) {
          // optimum of the perturbed problem: reinstate the exact bounds
          // and let the loop polish away what that reintroduces (reduced
          // costs are unaffected, so this is a short primal cleanup)
          load_exact_bounds();
          perturbed = false;
          compute_xb();
          degen_streak = 0;
          bland = false;
          continue;
        }
        // Candidate optimum: flush drift, then check the answer against the
        // constraints themselves, not just the factorized image of them.
        compute_xb();
        bool clean = true;
        for (int i = 0; i < m_ && clean; ++i) {
          const int v = basis_[i];
          const double tol = kFeasTol * (10.0 + std::fabs(xb_[i]));
          if (xb_[i] < lb_[v] - tol || xb_[i] > ub_[v] + tol) clean = false;
        }
        if (clean) {
          work_n_.resize(n_);
          for (int j = 0; j < n_; ++j) work_n_[j] = value_of(j);
          for (int i = 0; i < m_ && clean; ++i) {
            double act = 0.0;
            for (int k = rs_ptr_[i]; k < rs_ptr_[i + 1]; ++k)
              act += rs_val_[k] * work_n_[rs_col_[k]];
            const double tol = kFeasTol * (10.0 + std::fabs(act));
            if (act < row_lb_[i] - tol || act > row_ub_[i] + tol)
              clean = false;
          }
        }
        if (!clean && verify_rounds < 3) {
          ++verify_rounds;
          rebuild_or_restart();
          continue;
        }
        if (!clean)
          throw SolveError("optimum failed residual verification");
        res.status = SolveStatus::Optimal;
        break;
      }
    }

    // ---- ftran and ratio test ----
    ftran(enter, alpha_);
    double t_basic = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[i];
      if (std::fabs(a) <= kPivotTol) continue;
      const double delta = -sigma * a;
      const int v = basis_[i];
      double ratio;
      if (delta > 0.0) {
        if (fstate_[i] < 0) ratio = (lb_[v] - xb_[i]) / delta;
        else if (fstate_[i] == 0 && finite(ub_[v])) ratio = (ub_[v] - xb_[i]) / delta;
        else continue;
      } else {
        if (fstate_[i] > 0) ratio = (xb_[i] - ub_[v]) / (-delta);
        else if (fstate_[i] == 0 && finite(lb_[v])) ratio = (xb_[i] - lb_[v]) / (-delta);
        else continue;
      }
      if (ratio < 0.0) ratio = 0.0;
      if (ratio < t_basic) t_basic = ratio;
    }

    const double range_e = ub_[enter] - lb_[enter];
    const bool can_flip = nb_status_[enter] != kFree && finite(range_e);

    if (!finite(t_basic) && !can_flip) {
      if (phase1) {
        // a descent direction of the infeasibility with no breakpoint is a
        // numerical artifact; rebuild and retry once
        if (refactors_left > 0) {
          --refactors_left;
          rebuild_or_restart();
          continue;
        }
        throw SolveError("phase-1 ray without breakpoint (numerical failure)");
      }
      res.status = SolveStatus::Unbounded;
      break;
    }

    if (can_flip && range_e <= t_basic) {
      // bound flip: entering runs to its other bound, basis unchanged
      const double step = range_e;
      if (step > kDegenStep) { degen_streak = 0; bland = false; }
      for (int i = 0; i < m_; ++i) xb_[i] += (-sigma * alpha_[i]) * step;
      nb_status_[enter] = nb_status_[enter] == kAtLower ? kAtUpper : kAtLower;
      continue;
    }

    // choose the leaving slot among near-ties of the min ratio
    const double tie_tol = 1e-9 * (1.0 + t_basic);
    int leave = -1;
    int leave_to_upper = 0;
    double best_mag = 0.0;
    int best_var = total_;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[i];
      if (std::fabs(a) <= kPivotTol) continue;
      const double delta = -sigma * a;
      const int v = basis_[i];
      double ratio;
      int to_upper;
      if (delta > 0.0) {
        if (fstate_[i] < 0) { ratio = (lb_[v] - xb_[i]) / delta; to_upper = 0; }
        else if (fstate_[i] == 0 && finite(ub_[v])) { ratio = (ub_[v] - xb_[i]) / delta; to_upper = 1; }
        else continue;
      } else {
        if (fstate_[i] > 0) { ratio = (xb_[i] - ub_[v]) / (-delta); to_upper = 1; }
        else if (fstate_[i] == 0 && finite(lb_[v])) { ratio = (xb_[i] - lb_[v]) / (-delta); to_upper = 0; }
        else continue;
      }
      if (ratio < 0.0) ratio = 0.0;
      if (ratio > t_basic + tie_tol) continue;
      if (bland) {
        if (v < best_var) { best_var = v; leave = i; leave_to_upper = to_upper; }
      } else {
        const double mag = std::fabs(a);
        if (mag > best_mag) { best_mag = mag; leave = i; leave_to_upper = to_upper; }
      }
    }
    if (leave < 0) {
      // every blocking entry was filtered as numerically tiny
      if (refactors_left > 0) {
        --refactors_left;
        rebuild_or_restart();
        continue;
      }
      throw SolveError("ratio test found no usable pivot");
    }
    if (std::fabs(alpha_[leave]) < kGoodPivot && refactors_left > 0 &&
        iters > last_rebuild_iter + 20) {
      // A pivot this small is more likely drift than structure.  Rebuild so
      // the column is recomputed from an exact inverse; a phantom pivot
      // disappears, while a real one comes back and is then accepted (the
      // rearm distance keeps a structurally tiny pivot from looping here).
      --refactors_left;
      rebuild_or_restart();
      continue;
    }

    const double step = t_basic;
    if (step > kDegenStep) {
      degen_streak = 0;
      bland = false;
    } else if (++degen_streak >= kBlandTrigger) {
      if (!perturbed && pert_rounds < 3) {
        perturb_bounds();
        ++pert_rounds;
        compute_xb();  // nonbasic values moved with their bounds
        degen_streak = 0;
        continue;
      }
      bland = true;  // perturbation was not enough; grind it out safely
    }

    for (int i = 0; i < m_; ++i) xb_[i] += (-sigma * alpha_[i]) * step;
    const double enter_value = value_of(enter) + sigma * step;

    const int leaving_var = basis_[leave];
    nb_status_[leaving_var] = leave_to_upper ? kAtUpper : kAtLower;

    // row `leave` of Binv, needed by both updates below
    for (int k = 0; k < m_; ++k)
      pivot_row_[k] = binv_[static_cast<std::size_t>(k) * m_ + leave];
    if (!phase1 && duals_valid)
      update_duals_after_pivot(leave, enter, alpha_[leave]);

    if (std::fabs(alpha_[leave]) < kGoodPivot) {
      // accept reluctantly; schedule a refresh so drift stays bounded
      since_refresh = kDualRefresh;
    }
    apply_pivot(leave, enter, alpha_);
    xb_[leave] = enter_value;
    ++since_refresh;
  }

  // ---- results ----
  if (perturbed) load_exact_bounds();  // never report against loosened bounds
  res.iterations = iters;
  total_iterations_ += iters;
  res.x.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    double v = value_of(j);
    if (finite(lb_[j]) && v < lb_[j]) v = lb_[j];
    if (finite(ub_[j]) && v > ub_[j]) v = ub_[j];
    res.x[j] = v;
  }
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += cost_[j] * res.x[j];
  res.objective = obj;
  res.duals.assign(m_, 0.0);
  if (res.status == SolveStatus::Optimal) {
    std::vector<double> cb(m_, 0.0);
    bool any = false;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_ && cost_[basis_[i]] != 0.0) {
        cb[i] = cost_[basis_[i]];
        any = true;
      }
    }
    if (any) {
      for (int k = 0; k < m_; ++k) {
        const double* col = binv_.data() + static_cast<std::size_t>(k) * m_;
        double acc = 0.0;
        for (int i = 0; i < m_; ++i) acc += col[i] * cb[i];
        res.duals[k] = acc;
      }
    }
  }
  return res;
}

}  // namespace taperplan::milp
