#include "taperplan/planmodel.hpp"

#include <cmath>
#include <stdexcept>

#include "taperplan/errors.hpp"

namespace taperplan::plan {

using milp::kInf;
using milp::RowEntry;

namespace {

std::string step_tag(int y, int d, int t) {
  return "y" + std::to_string(y) + "_d" + std::to_string(d) + "_t" +
         std::to_string(t);
}

void require_clean(std::vector<std::string> issues, const char* what) {
  if (issues.empty()) return;
  std::string msg = std::string(what) + ": " + issues.front();
  if (issues.size() > 1)
    msg += " (+" + std::to_string(issues.size() - 1) + " more)";
  throw ConfigError(msg);
}

}  // namespace

PlanModel build_baseline(const PlanningConfig& cfg, const Profiles& prof) {
  // the fixed-rate model has no band schedule of its own; validate the
  // configuration against the trivial full-window schedule
  require_clean(validate_config(
                    cfg, TaperSchedule::single_band(cfg.soc_min, cfg.soc_max)),
                "invalid planning configuration");
  require_clean(validate_profiles(prof), "invalid profiles");

  PlanModel pm;
  pm.band_reference = cfg.band_reference;
  VariableCatalog& v = pm.vars;
  v.n_years = prof.years;
  v.n_days = prof.days;
  v.n_hours = prof.hours;
  milp::SparseMilp& M = pm.milp;

  v.s_pv = M.add_column("S_pv", 0.0, cfg.s_pv_max, cfg.c_pv_capital);
  v.s_bess = M.add_column("S_bess", 0.0, cfg.s_bess_max, cfg.c_bess_capital);
  v.e_init = M.add_column("E_init", 0.0, cfg.soc_max * cfg.s_bess_max, 0.0);
  v.c_pv_deg = M.add_column("C_pv_deg", 0.0, kInf, cfg.y_mg);

  const int total = prof.years * prof.days * prof.hours;
  v.steps.resize(total);
  pm.charge_cap_rows.assign(total, -1);

  for (int y = 1; y <= prof.years; ++y) {
    const double eta_y = pv_efficiency(cfg, y);
    for (int d = 1; d <= prof.days; ++d) {
      for (int t = 1; t <= prof.hours; ++t) {
        const int s = v.step_index(y, d, t);
        StepVars& sv = v.steps[s];
        const double load = prof.load_at(y, d, t);
        const double cf = prof.pv_at(y, d, t);
        const double pv_gain = eta_y * cf;  // MW of usable PV per MW built
        const std::string tag = step_tag(y, d, t);

        sv.p_chg =
            M.add_column("chg_" + tag, 0.0, cfg.s_bess_max / cfg.t_chg, 0.0);
        sv.p_dchg =
            M.add_column("dch_" + tag, 0.0, cfg.s_bess_max / cfg.t_dchg, 0.0);
        sv.p_ls = M.add_column("shed_" + tag, 0.0, load,
                               cfg.alpha * cfg.c_ls_penalty);
        sv.p_curt = M.add_column("curt_" + tag, 0.0,
                                 cf > 0.0 ? pv_gain * cfg.s_pv_max : 0.0, 0.0);
        sv.e = M.add_column("e_" + tag, 0.0, cfg.soc_max * cfg.s_bess_max,
                            0.0);
        sv.u_chg = M.add_column("uc_" + tag, 0.0, 1.0, 0.0, true);
        sv.u_dchg = M.add_column("ud_" + tag, 0.0, 1.0, 0.0, true);

        // supplied power serves the load, after shedding and curtailment
        std::vector<RowEntry> bal = {{sv.p_dchg, 1.0},
                                     {sv.p_ls, 1.0},
                                     {sv.p_chg, -1.0},
                                     {sv.p_curt, -1.0}};
        if (cf > 0.0) bal.push_back({v.s_pv, pv_gain});
        M.add_row("balance_" + tag, load, load, bal);
        if (cf > 0.0)
          M.add_row("curtcap_" + tag, -kInf, 0.0,
                    {{sv.p_curt, 1.0}, {v.s_pv, -pv_gain}});
        M.add_row("socmin_" + tag, 0.0, kInf,
                  {{sv.e, 1.0}, {v.s_bess, -cfg.soc_min}});
        M.add_row("socmax_" + tag, -kInf, 0.0,
                  {{sv.e, 1.0}, {v.s_bess, -cfg.soc_max}});
        M.add_row("excl_" + tag, -kInf, 1.0,
                  {{sv.u_chg, 1.0}, {sv.u_dchg, 1.0}});
        pm.charge_cap_rows[s] =
            M.add_row("chgcap_" + tag, -kInf, 0.0,
                      {{sv.p_chg, 1.0}, {v.s_bess, -1.0 / cfg.t_chg}});
        M.add_row("chgind_" + tag, -kInf, 0.0,
                  {{sv.p_chg, 1.0}, {sv.u_chg, -cfg.m_bess}});
        M.add_row("dchcap_" + tag, -kInf, 0.0,
                  {{sv.p_dchg, 1.0}, {v.s_bess, -1.0 / cfg.t_dchg}});
        M.add_row("dchind_" + tag, -kInf, 0.0,
                  {{sv.p_dchg, 1.0}, {sv.u_dchg, -cfg.m_bess}});
        // stored energy carried from the previous hour of the same day,
        // with each day starting from the shared initial level
        const int e_prev = t == 1 ? v.e_init : v.steps[s - 1].e;
        M.add_row("ebal_" + tag, 0.0, 0.0,
                  {{sv.e, 1.0},
                   {e_prev, -1.0},
                   {sv.p_chg, -cfg.eta_chg},
                   {sv.p_dchg, 1.0 / cfg.eta_dchg}});
      }
      if (cfg.terminal_soc_constraint) {
        const int last = v.steps[v.step_index(y, d, prof.hours)].e;
        M.add_row("dayend_y" + std::to_string(y) + "_d" + std::to_string(d),
                  0.0, kInf, {{last, 1.0}, {v.e_init, -1.0}});
      }
    }
  }

  M.add_row("einit_lo", 0.0, kInf,
            {{v.e_init, 1.0}, {v.s_bess, -cfg.soc_min}});
  M.add_row("einit_hi", -kInf, 0.0,
            {{v.e_init, 1.0}, {v.s_bess, -cfg.soc_max}});
  // annualized replacement cost recovering lost PV output
  M.add_row("pvdeg", 0.0, 0.0,
            {{v.c_pv_deg, 1.0},
             {v.s_pv, -cfg.gamma_pv_rep * cfg.c_pv_capital *
                          cfg.delta_pv_deg}});
  if (cfg.init_soc_fraction)
    M.add_row("einit_fix", 0.0, 0.0,
              {{v.e_init, 1.0}, {v.s_bess, -*cfg.init_soc_fraction}});
  return pm;
}

void add_tapering(PlanModel& pm, const PlanningConfig& cfg,
                  const TaperSchedule& sched) {
  if (pm.taper)
    throw std::logic_error("tapering has already been added to this model");
  require_clean(validate_config(cfg, sched), "invalid band schedule");

  milp::SparseMilp& M = pm.milp;
  VariableCatalog& v = pm.vars;
  const double cap_s = M.col_upper[v.s_bess];  // size ceiling for envelopes
  const int nb = static_cast<int>(sched.bands.size());

  for (int y = 1; y <= v.n_years; ++y) {
    for (int d = 1; d <= v.n_days; ++d) {
      for (int t = 1; t <= v.n_hours; ++t) {
        const int s = v.step_index(y, d, t);
        StepVars& sv = v.steps[s];
        const std::string tag = step_tag(y, d, t);
        // which stored-energy level decides the band for this step
        const int e_prev = t == 1 ? v.e_init : v.steps[s - 1].e;
        const int e_ref =
            pm.band_reference == BandReference::EndOfInterval ? sv.e : e_prev;

        sv.u_band.resize(nb);
        sv.w_band.resize(nb);
        for (int b = 0; b < nb; ++b) {
          const std::string bt = std::to_string(b + 1) + "_" + tag;
          sv.u_band[b] = M.add_column("tu" + bt, 0.0, 1.0, 0.0, true);
          sv.w_band[b] = M.add_column("tw" + bt, 0.0, cap_s, 0.0);
        }

        // charging selects exactly one band; idle steps select none
        std::vector<RowEntry> sel;
        for (int b = 0; b < nb; ++b) sel.push_back({sv.u_band[b], 1.0});
        sel.push_back({sv.u_chg, -1.0});
        M.add_row("tsel_" + tag, 0.0, 0.0, sel);

        for (int b = 0; b < nb; ++b) {
          const TaperBand& band = sched.bands[b];
          const std::string bt = std::to_string(b + 1) + "_" + tag;
          const int u = sv.u_band[b];
          const int w = sv.w_band[b];
          // w equals the storage size when its band is selected and zero
          // otherwise; together with the sum row below this is exact
          M.add_row("twcap" + bt, -kInf, 0.0, {{w, 1.0}, {u, -cap_s}});
          M.add_row("twlink" + bt, -cap_s, kInf,
                    {{w, 1.0}, {v.s_bess, -1.0}, {u, -cap_s}});
          // a selected band must contain the referenced stored energy:
          // tau_lower * S <= E_ref <= tau_upper * S, written against w so
          // unselected bands impose nothing new
          M.add_row("tblo" + bt, 0.0, kInf,
                    {{e_ref, 1.0}, {w, -band.tau_lower}});
          M.add_row("tbhi" + bt, -kInf, 0.0,
                    {{e_ref, 1.0},
                     {w, cfg.soc_max - band.tau_upper},
                     {v.s_bess, -cfg.soc_max}});
        }

        std::vector<RowEntry> agg;
        for (int b = 0; b < nb; ++b) agg.push_back({sv.w_band[b], 1.0});
        agg.push_back({v.s_bess, -1.0});
        M.add_row("twsum_" + tag, -kInf, 0.0, agg);

        // the tapered cap itself: rate factor of the selected band
        std::vector<RowEntry> cap = {{sv.p_chg, 1.0}};
        for (int b = 0; b < nb; ++b)
          cap.push_back({sv.w_band[b], -sched.bands[b].beta / cfg.t_chg});
        M.add_row("tcap_" + tag, -kInf, 0.0, cap);
      }
    }
  }

  // the fixed-rate caps are superseded wholesale
  std::vector<int> doomed;
  for (int r : pm.charge_cap_rows)
    if (r >= 0) doomed.push_back(r);
  M.remove_rows(doomed);
  for (int& r : pm.charge_cap_rows) r = -1;
  pm.taper = sched;
}

PlanSolution extract_solution(const PlanModel& pm, const PlanningConfig& cfg,
                              const Profiles& prof,
                              const milp::MilpSolution& sol) {
  (void)cfg;
  PlanSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.nodes = sol.nodes;
  out.wall_time_s = sol.wall_time_s;
  if (sol.values.size() != static_cast<std::size_t>(pm.milp.n_cols()))
    return out;  // no usable assignment (infeasible, unbounded, limit)

  const VariableCatalog& v = pm.vars;
  const std::vector<double>& x = sol.values;
  out.s_pv_mw = x[v.s_pv];
  out.s_bess_mwh = x[v.s_bess];
  out.e_init_mwh = x[v.e_init];
  out.pv_deg_cost = x[v.c_pv_deg];

  out.dispatch.reserve(v.steps.size());
  for (int y = 1; y <= prof.years; ++y) {
    for (int d = 1; d <= prof.days; ++d) {
      for (int t = 1; t <= prof.hours; ++t) {
        const StepVars& sv = v.steps[v.step_index(y, d, t)];
        StepDispatch sd;
        sd.year = y;
        sd.day = d;
        sd.hour = t;
        sd.charge_mw = x[sv.p_chg];
        sd.discharge_mw = x[sv.p_dchg];
        sd.shed_mw = x[sv.p_ls];
        sd.curtail_mw = x[sv.p_curt];
        sd.energy_mwh = x[sv.e];
        sd.soc = out.s_bess_mwh > 1e-9 ? sd.energy_mwh / out.s_bess_mwh : 0.0;
        sd.charging = x[sv.u_chg] > 0.5;
        sd.discharging = x[sv.u_dchg] > 0.5;
        for (std::size_t b = 0; b < sv.u_band.size(); ++b)
          if (x[sv.u_band[b]] > 0.5) sd.band = static_cast<int>(b);
        out.shed_mwh += sd.shed_mw;
        out.curtailed_mwh += sd.curtail_mw;
        out.dispatch.push_back(sd);
      }
    }
  }
  return out;
}

std::vector<Violation> check_solution(const PlanModel& pm,
                                      const PlanningConfig& cfg,
                                      const Profiles& prof,
                                      const std::vector<double>& x,
                                      double tol) {
  std::vector<Violation> out;
  if (x.size() != static_cast<std::size_t>(pm.milp.n_cols())) {
    out.push_back({"solution vector length does not match the model",
                   std::fabs(static_cast<double>(x.size()) -
                             pm.milp.n_cols())});
    return out;
  }
  const VariableCatalog& v = pm.vars;
  auto flag = [&out](const std::string& what, double amount) {
    out.push_back({what, amount});
  };
  // value must not exceed limit; slack scales with the limit's magnitude
  auto check_le = [&](double value, double limit, const std::string& what) {
    const double excess = value - limit;
    if (excess > tol * (1.0 + std::fabs(limit))) flag(what, excess);
  };
  auto check_eq = [&](double value, double target, const std::string& what) {
    const double err = std::fabs(value - target);
    if (err > tol * (1.0 + std::fabs(target))) flag(what, err);
  };

  const double s_pv = x[v.s_pv];
  const double s_bess = x[v.s_bess];
  const double e_init = x[v.e_init];

  check_le(-s_pv, 0.0, "negative PV size");
  check_le(s_pv, cfg.s_pv_max, "PV size above its cap");
  check_le(-s_bess, 0.0, "negative storage size");
  check_le(s_bess, cfg.s_bess_max, "storage size above its cap");
  check_le(cfg.soc_min * s_bess, e_init, "initial energy below the SOC floor");
  check_le(e_init, cfg.soc_max * s_bess,
           "initial energy above the SOC ceiling");
  if (cfg.init_soc_fraction)
    check_eq(e_init, *cfg.init_soc_fraction * s_bess,
             "initial energy off the configured fraction");
  check_eq(x[v.c_pv_deg],
           cfg.gamma_pv_rep * cfg.c_pv_capital * cfg.delta_pv_deg * s_pv,
           "degradation cost inconsistent with the PV size");

  for (int y = 1; y <= prof.years; ++y) {
    const double eta_y = pv_efficiency(cfg, y);
    for (int d = 1; d <= prof.days; ++d) {
      for (int t = 1; t <= prof.hours; ++t) {
        const StepVars& sv = v.steps[v.step_index(y, d, t)];
        const std::string at = " at " + step_tag(y, d, t);
        const double load = prof.load_at(y, d, t);
        const double cf = prof.pv_at(y, d, t);
        const double chg = x[sv.p_chg];
        const double dch = x[sv.p_dchg];
        const double shed = x[sv.p_ls];
        const double curt = x[sv.p_curt];
        const double e_now = x[sv.e];
        const double uc = x[sv.u_chg];
        const double ud = x[sv.u_dchg];

        check_le(-chg, 0.0, "negative charging" + at);
        check_le(-dch, 0.0, "negative discharging" + at);
        check_le(-shed, 0.0, "negative shed" + at);
        check_le(-curt, 0.0, "negative curtailment" + at);
        check_le(shed, load, "shedding more than the load" + at);
        check_le(curt, eta_y * cf * s_pv,
                 "curtailing more than the PV output" + at);

        const double supplied = eta_y * cf * s_pv - curt + dch - chg + shed;
        check_eq(supplied, load, "power balance" + at);

        if (std::fabs(uc - std::round(uc)) > tol)
          flag("charge indicator not integral" + at,
               std::fabs(uc - std::round(uc)));
        if (std::fabs(ud - std::round(ud)) > tol)
          flag("discharge indicator not integral" + at,
               std::fabs(ud - std::round(ud)));
        check_le(uc + ud, 1.0, "charging and discharging together" + at);

        check_le(cfg.soc_min * s_bess, e_now,
                 "stored energy below the SOC floor" + at);
        check_le(e_now, cfg.soc_max * s_bess,
                 "stored energy above the SOC ceiling" + at);

        check_le(dch, s_bess / cfg.t_dchg, "discharge rate cap" + at);
        check_le(dch, cfg.m_bess * ud, "discharging while not enabled" + at);
        check_le(chg, cfg.m_bess * uc, "charging while not enabled" + at);

        const int s = v.step_index(y, d, t);
        const double prev_e = t == 1 ? e_init : x[v.steps[s - 1].e];
        check_eq(e_now, prev_e + cfg.eta_chg * chg - dch / cfg.eta_dchg,
                 "stored energy bookkeeping" + at);

        if (!pm.taper) {
          check_le(chg, s_bess / cfg.t_chg, "charge rate cap" + at);
        } else if (chg > tol * (1.0 + cfg.m_bess)) {
          // SOC-dependent cap evaluated from the physical ratio
          if (s_bess <= tol) {
            flag("charging with no storage built" + at, chg);
          } else {
            const double e_ref =
                pm.band_reference == BandReference::EndOfInterval ? e_now
                                                                  : prev_e;
            const double soc_ref = e_ref / s_bess;
            const double slack = tol * (1.0 + (1.0 + e_ref) / s_bess);
            double beta = -1.0;
            for (const TaperBand& band : pm.taper->bands)
              if (soc_ref >= band.tau_lower - slack &&
                  soc_ref <= band.tau_upper + slack)
                beta = std::max(beta, band.beta);
            if (beta < 0.0) {
              flag("referenced state of charge outside every band" + at,
                   soc_ref);
            } else {
              check_le(chg, beta * s_bess / cfg.t_chg,
                       "state-of-charge dependent charge cap" + at);
            }
          }
        }
      }
      if (cfg.terminal_soc_constraint) {
        const double e_last = x[v.steps[v.step_index(y, d, prof.hours)].e];
        check_le(e_init, e_last,
                 "day ends below its starting energy at y" +
                     std::to_string(y) + "_d" + std::to_string(d));
      }
    }
  }
  return out;
}

}  // namespace taperplan::plan
