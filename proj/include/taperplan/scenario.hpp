#pragma once

// Benchmark scenario: one synthetic service territory with a single
// representative day, and the four-case study contrasting charge-rate
// tapering at planning time and at dispatch time.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "taperplan/domain.hpp"
#include "taperplan/milp.hpp"
#include "taperplan/planmodel.hpp"

namespace taperplan::scenario {

// 24-hour shapes tiled over the given number of model years: a flat 0.5 MW
// base load with a 1.5 MW evening peak (18 MWh per day, all values exactly
// representable so lifetime totals stay exact), and a daylight PV bell worth
// 7 capacity-factor hours.
Profiles benchmark_profiles(int years);

// Representative-day weight that preserves lifetime served energy when only
// model_years are built out of a horizon_years plan: each modeled year then
// stands for horizon_years / model_years calendar years (the ratio need not
// be an integer; the weight simply scales).
double compressed_alpha(double per_year_weight, int horizon_years,
                        int model_years);

struct CaseSetup {
  std::string name;
  bool tapered = false;                // SOC-band charging caps in force
  std::optional<double> fixed_pv_mw;   // pin the size instead of optimizing
  std::optional<double> fixed_bess_mwh;
};

struct CaseOutcome {
  CaseSetup setup;
  plan::PlanSolution solution;
  std::vector<plan::Violation> audit;  // check_solution on the winner
};

// Horizon totals for one solved case, weighted the way the objective weighs
// operating cost: every modeled hour stands for alpha repetitions.
struct CaseTotals {
  double load_mwh = 0.0;
  double pv_gen_mwh = 0.0;  // available PV at the year's panel efficiency
  double pv_curtailed_mwh = 0.0;
  double charge_mwh = 0.0;
  double discharge_mwh = 0.0;
  double shed_mwh = 0.0;
};
CaseTotals lifetime_totals(const PlanningConfig& cfg, const Profiles& prof,
                           const plan::PlanSolution& sol);

// Metric-per-row, case-per-column CSV summary of a finished study.  Sizes a
// case inherited rather than optimized carry a "fixed" marker; numbers are
// rendered round-trip exact.  Needs at least one outcome.
std::string report_csv(const PlanningConfig& cfg, const Profiles& prof,
                       const std::vector<CaseOutcome>& cases);

// Builds, solves, extracts, and audits one case.  Pinned sizes are applied
// before tapering is installed so the band envelopes stay tight.
CaseOutcome run_case(const PlanningConfig& cfg, const Profiles& prof,
                     const TaperSchedule& sched, const CaseSetup& setup,
                     const milp::MilpOptions& opt = {});

// The four-case study: plan with tapering (1) and without (2), then swap the
// resulting sizes across dispatch assumptions -- fixed-rate dispatch of the
// taper-aware sizes (3) and tapered dispatch of the taper-blind sizes (4).
std::array<CaseOutcome, 4> run_case_study(const PlanningConfig& cfg,
                                          const Profiles& prof,
                                          const TaperSchedule& sched,
                                          const milp::MilpOptions& opt = {});

}  // namespace taperplan::scenario
