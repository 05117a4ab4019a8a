#include "taperplan/scenario.hpp"

#include <stdexcept>

#include "taperplan/errors.hpp"
#include "taperplan/util.hpp"

namespace taperplan::scenario {

Profiles benchmark_profiles(int years) {
  if (years < 1)
    throw ConfigError("benchmark profiles need at least one year, got " +
                      std::to_string(years));
  Profiles p;
  p.years = years;
  p.days = 1;
  p.hours = 24;
  p.load.reserve(static_cast<std::size_t>(years) * 24);
  p.pv_cf.reserve(static_cast<std::size_t>(years) * 24);
  for (int y = 0; y < years; ++y) {
    for (int t = 1; t <= 24; ++t) {
      p.load.push_back(t >= 17 && t <= 22 ? 1.5 : 0.5);
      double cf = 0.0;
      if (t >= 7 && t <= 10) cf = (t - 6) / 5.0;        // morning ramp
      else if (t >= 11 && t <= 14) cf = 1.0;            // solar noon
      else if (t >= 15 && t <= 16) cf = (17 - t) / 3.0; // afternoon fall
      p.pv_cf.push_back(cf);
    }
  }
  return p;
}

double compressed_alpha(double per_year_weight, int horizon_years,
                        int model_years) {
  if (horizon_years < 1 || model_years < 1)
    throw ConfigError("horizon and modeled years must both be positive, got " +
                      std::to_string(horizon_years) + " over " +
                      std::to_string(model_years));
  if (!(per_year_weight > 0.0))
    throw ConfigError("per-year weight must be positive");
  return per_year_weight * horizon_years / model_years;
}

CaseTotals lifetime_totals(const PlanningConfig& cfg, const Profiles& prof,
                           const plan::PlanSolution& sol) {
  CaseTotals tot;
  for (const plan::StepDispatch& s : sol.dispatch) {
    const double gain = pv_efficiency(cfg, s.year) * prof.pv_at(s.year, s.day, s.hour);
    tot.load_mwh += cfg.alpha * prof.load_at(s.year, s.day, s.hour);
    tot.pv_gen_mwh += cfg.alpha * gain * sol.s_pv_mw;
    tot.pv_curtailed_mwh += cfg.alpha * s.curtail_mw;
    tot.charge_mwh += cfg.alpha * s.charge_mw;
    tot.discharge_mwh += cfg.alpha * s.discharge_mw;
    tot.shed_mwh += cfg.alpha * s.shed_mw;
  }
  return tot;
}

std::string report_csv(const PlanningConfig& cfg, const Profiles& prof,
                       const std::vector<CaseOutcome>& cases) {
  if (cases.empty())
    throw ConfigError("a case report needs at least one solved case");

  std::vector<CaseTotals> totals;
  totals.reserve(cases.size());
  for (const CaseOutcome& c : cases)
    totals.push_back(lifetime_totals(cfg, prof, c.solution));

  // one metric per row so the table reads like a results summary; sizes a
  // case merely inherited are marked rather than blanked out
  auto size_cell = [](double v, bool inherited) {
    std::string s = format_double(v);
    if (inherited) s += " (fixed)";
    return s;
  };

  std::string out = "metric";
  for (const CaseOutcome& c : cases) out += "," + c.setup.name;
  out += "\n";
  auto row = [&](const std::string& name, auto&& cell) {
    out += name;
    for (std::size_t i = 0; i < cases.size(); ++i) out += "," + cell(i);
    out += "\n";
  };
  row("objective_cost", [&](std::size_t i) {
    return format_double(cases[i].solution.objective);
  });
  row("pv_size_mw", [&](std::size_t i) {
    return size_cell(cases[i].solution.s_pv_mw,
                     cases[i].setup.fixed_pv_mw.has_value());
  });
  row("bess_size_mwh", [&](std::size_t i) {
    return size_cell(cases[i].solution.s_bess_mwh,
                     cases[i].setup.fixed_bess_mwh.has_value());
  });
  row("total_load_mwh",
      [&](std::size_t i) { return format_double(totals[i].load_mwh); });
  row("total_pv_generation_mwh",
      [&](std::size_t i) { return format_double(totals[i].pv_gen_mwh); });
  row("total_pv_curtailed_mwh",
      [&](std::size_t i) { return format_double(totals[i].pv_curtailed_mwh); });
  row("total_charge_mwh",
      [&](std::size_t i) { return format_double(totals[i].charge_mwh); });
  row("total_discharge_mwh",
      [&](std::size_t i) { return format_double(totals[i].discharge_mwh); });
  row("total_shed_mwh",
      [&](std::size_t i) { return format_double(totals[i].shed_mwh); });
  return out;
}

CaseOutcome run_case(const PlanningConfig& cfg, const Profiles& prof,
                     const TaperSchedule& sched, const CaseSetup& setup,
                     const milp::MilpOptions& opt) {
  CaseOutcome out;
  out.setup = setup;

  plan::PlanModel pm = plan::build_baseline(cfg, prof);
  milp::SparseMilp& M = pm.milp;
  if (setup.fixed_pv_mw) {
    M.col_lower[pm.vars.s_pv] = *setup.fixed_pv_mw;
    M.col_upper[pm.vars.s_pv] = *setup.fixed_pv_mw;
  }
  if (setup.fixed_bess_mwh) {
    M.col_lower[pm.vars.s_bess] = *setup.fixed_bess_mwh;
    M.col_upper[pm.vars.s_bess] = *setup.fixed_bess_mwh;
  }
  if (setup.tapered) plan::add_tapering(pm, cfg, sched);

  milp::MilpSolution sol = milp::solve_milp(M, opt);
  out.solution = plan::extract_solution(pm, cfg, prof, sol);
  if (!sol.values.empty())
    out.audit = plan::check_solution(pm, cfg, prof, sol.values);
  return out;
}

std::array<CaseOutcome, 4> run_case_study(const PlanningConfig& cfg,
                                          const Profiles& prof,
                                          const TaperSchedule& sched,
                                          const milp::MilpOptions& opt) {
  std::array<CaseOutcome, 4> out;
  out[0] = run_case(cfg, prof, sched, {"aware_plan", true, {}, {}}, opt);
  out[1] = run_case(cfg, prof, sched, {"blind_plan", false, {}, {}}, opt);

  // size swaps only make sense once both plans actually solved
  for (int i = 0; i < 2; ++i)
    if (out[i].solution.status != milp::SolveStatus::Optimal &&
        out[i].solution.status != milp::SolveStatus::Feasible)
      throw SolveError("case study aborted: " + out[i].setup.name +
                       " ended " + milp::to_string(out[i].solution.status));

  out[2] = run_case(cfg, prof, sched,
                    {"blind_dispatch_aware_sizes", false,
                     out[0].solution.s_pv_mw, out[0].solution.s_bess_mwh},
                    opt);
  out[3] = run_case(cfg, prof, sched,
                    {"aware_dispatch_blind_sizes", true,
                     out[1].solution.s_pv_mw, out[1].solution.s_bess_mwh},
                    opt);
  return out;
}

}  // namespace taperplan::scenario
