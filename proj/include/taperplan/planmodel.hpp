#pragma once

// Sizing model for a solar-plus-storage microgrid: PV capacity and battery
// capacity are chosen together with representative-day dispatch so that
// lifetime capital, degradation, and unserved-energy costs are minimized.
// The battery's charging power can optionally be limited by state-of-charge
// bands with decreasing rate factors, mimicking how real constant-current /
// constant-voltage charging slows near full charge.

#include <optional>
#include <string>
#include <vector>

#include "taperplan/domain.hpp"
#include "taperplan/milp.hpp"

namespace taperplan::plan {

// Column handles for one dispatch step (one hour of one representative day).
struct StepVars {
  int p_chg = -1;   // charging power drawn into storage, MW
  int p_dchg = -1;  // discharging power delivered, MW
  int p_ls = -1;    // load shed, MW
  int p_curt = -1;  // PV output curtailed, MW
  int e = -1;       // stored energy at the end of the step, MWh
  int u_chg = -1;   // binary: step may charge
  int u_dchg = -1;  // binary: step may discharge
  // Filled when rate tapering is added:
  std::vector<int> u_band;  // binary selector per SOC band
  std::vector<int> w_band;  // band-gated copy of the storage size, MWh
};

// Where every decision variable lives inside the solver model.
struct VariableCatalog {
  int s_pv = -1;      // PV plant size, MW
  int s_bess = -1;    // storage size, MWh
  int e_init = -1;    // stored energy at the start of each day, MWh
  int c_pv_deg = -1;  // annualized PV degradation replacement cost
  int n_years = 0, n_days = 0, n_hours = 0;
  std::vector<StepVars> steps;  // year-major flattening

  int step_index(int y, int d, int t) const {  // 1-based coordinates
    return ((y - 1) * n_days + (d - 1)) * n_hours + (t - 1);
  }
};

// The solver model plus everything needed to interpret or rewrite it.
struct PlanModel {
  milp::SparseMilp milp;
  VariableCatalog vars;
  // per-step fixed-rate charging cap rows; rewritten by add_tapering
  std::vector<int> charge_cap_rows;
  std::optional<TaperSchedule> taper;  // set once tapering is added
  BandReference band_reference = BandReference::EndOfInterval;
};

// Builds the model with the fixed-rate charging cap (no SOC dependence).
// Throws ConfigError when the configuration or profiles fail validation.
PlanModel build_baseline(const PlanningConfig& cfg,
                         const Profiles& prof);

// Replaces each step's fixed-rate charging cap with SOC-band tapering:
// exactly one band is selected while charging, the band must contain the
// referenced state of charge, and the charging cap becomes the selected
// band's rate factor times the built storage size over the charge duration.
// Must be called at most once per model.
void add_tapering(PlanModel& pm, const PlanningConfig& cfg,
                  const TaperSchedule& sched);

// One step of dispatch pulled out of a solution vector.
struct StepDispatch {
  int year = 0, day = 0, hour = 0;  // 1-based
  double charge_mw = 0.0;
  double discharge_mw = 0.0;
  double shed_mw = 0.0;
  double curtail_mw = 0.0;
  double energy_mwh = 0.0;  // stored energy at the end of the step
  double soc = 0.0;         // energy over built capacity; zero if no storage
  int band = -1;            // selected taper band, -1 when none applies
  bool charging = false;
  bool discharging = false;
};

struct PlanSolution {
  milp::SolveStatus status = milp::SolveStatus::Infeasible;
  double objective = 0.0;
  double s_pv_mw = 0.0;
  double s_bess_mwh = 0.0;
  double e_init_mwh = 0.0;
  double pv_deg_cost = 0.0;
  double shed_mwh = 0.0;       // summed over the modeled steps
  double curtailed_mwh = 0.0;  // summed over the modeled steps
  long nodes = 0;
  double wall_time_s = 0.0;
  std::vector<StepDispatch> dispatch;
};

// Interprets a solver result against the model layout.
PlanSolution extract_solution(const PlanModel& pm,
                              const PlanningConfig& cfg,
                              const Profiles& prof,
                              const milp::MilpSolution& sol);

// One violated requirement found while auditing a solution.
struct Violation {
  std::string what;      // which requirement, with step coordinates
  double amount = 0.0;   // by how much it is broken
};

// Audits a solution vector against the physical statements themselves
// (balances, windows, caps, and the SOC-dependent rate limit computed from
// the actual stored-energy ratio), not against the solver's linearized rows.
// Returns an empty list when everything holds within the tolerance.
std::vector<Violation> check_solution(const PlanModel& pm,
                                      const PlanningConfig& cfg,
                                      const Profiles& prof,
                                      const std::vector<double>& x,
                                      double tol = 1e-6);

}  // namespace taperplan::plan
