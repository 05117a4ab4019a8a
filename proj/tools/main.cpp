// Command-line front end: cell-pack charging experiments, microgrid sizing
// runs, the four-case tapering study, solver-model export, and independent
// solution audits.  Every command writes round-trip-exact CSVs plus a JSON
// manifest, and identical inputs always produce identical output bytes
// (wall time lives only in the manifest).

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "taperplan/cellsim.hpp"
#include "taperplan/config_io.hpp"
#include "taperplan/domain.hpp"
#include "taperplan/errors.hpp"
#include "taperplan/milp.hpp"
#include "taperplan/mps.hpp"
#include "taperplan/planmodel.hpp"
#include "taperplan/scenario.hpp"
#include "taperplan/util.hpp"

namespace fs = std::filesystem;
using namespace taperplan;

namespace {

// Stable exit-code contract shared by every subcommand.
constexpr int kOk = 0;           // success
constexpr int kCheckFailed = 1;  // an audit reported violations
constexpr int kConfigError = 2;  // unusable configuration or arguments
constexpr int kSimError = 3;     // charge simulation failed
constexpr int kInfeasible = 4;   // the optimization has no feasible point
constexpr int kDependency = 5;   // a required prior computation failed

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
};

struct ProfileArgs {
  std::string profile_path;  // CSV, exclusive with synthetic
  bool synthetic = false;
  int years = 1;
};

struct SolverArgs {
  double time_limit_s = 3600.0;
  double gap = 0.0;
  long node_limit = 0;  // 0 keeps the solver default (unlimited)
  int threads = 1;
};

struct PlanArgs {
  std::string taper = "on";
  std::optional<double> fix_pv;
  std::optional<double> fix_bess;
  std::string solver = "embedded";
  std::string solution_path;  // import for the mps-bridge round trip
};

milp::MilpOptions to_options(const SolverArgs& s) {
  milp::MilpOptions opt;
  opt.time_limit_s = s.time_limit_s;
  opt.gap_tol = s.gap;
  if (s.node_limit > 0) opt.node_limit = s.node_limit;
  opt.threads = s.threads;
  return opt;
}

Profiles resolve_profiles(const ProfileArgs& pa, io::RunManifest& manifest) {
  if (pa.synthetic == !pa.profile_path.empty())
    throw ConfigError("pick exactly one of --profile FILE or --synthetic");
  if (pa.synthetic) return scenario::benchmark_profiles(pa.years);
  manifest.inputs.emplace_back(pa.profile_path,
                               io::file_fingerprint(pa.profile_path));
  return io::load_profile_csv(pa.profile_path, pa.years);
}

plan::PlanModel build_model(const io::RunConfig& rc, const Profiles& prof,
                            const PlanArgs& pl) {
  plan::PlanModel pm = plan::build_baseline(rc.plan, prof);
  if (pl.fix_pv) {
    pm.milp.col_lower[pm.vars.s_pv] = *pl.fix_pv;
    pm.milp.col_upper[pm.vars.s_pv] = *pl.fix_pv;
  }
  if (pl.fix_bess) {
    pm.milp.col_lower[pm.vars.s_bess] = *pl.fix_bess;
    pm.milp.col_upper[pm.vars.s_bess] = *pl.fix_bess;
  }
  if (pl.taper == "on") plan::add_tapering(pm, rc.plan, rc.schedule);
  return pm;
}

std::string render(void (*writer)(const plan::PlanSolution&, std::ostream&),
                   const plan::PlanSolution& sol) {
  std::ostringstream ss;
  writer(sol, ss);
  return ss.str();
}

std::string status_line(const plan::PlanSolution& sol) {
  std::string s = milp::to_string(sol.status);
  if (sol.status == milp::SolveStatus::Feasible) s += "(gap)";
  return "status=" + s + " objective=" + format_double(sol.objective) +
         " s_pv_mw=" + format_double(sol.s_pv_mw) +
         " s_bess_mwh=" + format_double(sol.s_bess_mwh) +
         " shed_mwh=" + format_double(sol.shed_mwh);
}

void print_violations(const std::vector<plan::Violation>& audit) {
  for (const plan::Violation& v : audit)
    std::cerr << "violation: " << v.what << " (amount "
              << format_double(v.amount) << ")\n";
}

// Rebuilds the full solver-variable vector from the two CSVs so the audit
// can replay every constraint, not just the ones the CSVs spell out.
std::vector<double> assemble_values(
    const plan::PlanModel& pm, const PlanningConfig& cfg,
    const std::map<std::string, std::string>& sizing,
    const std::vector<plan::StepDispatch>& rows) {
  auto need = [&](const char* key) -> double {
    auto it = sizing.find(key);
    if (it == sizing.end())
      throw ParseError(std::string("sizing CSV lacks '") + key + "'");
    std::istringstream ss(it->second);
    double v = 0.0;
    if (!(ss >> v)) throw ParseError(std::string(key) + " is not a number");
    return v;
  };
  const double s_pv = need("s_pv_mw");
  const double s_bess = need("s_bess_mwh");

  std::vector<double> x(static_cast<std::size_t>(pm.milp.n_cols()), 0.0);
  x[pm.vars.s_pv] = s_pv;
  x[pm.vars.s_bess] = s_bess;
  x[pm.vars.e_init] = need("e_init_mwh");
  x[pm.vars.c_pv_deg] =
      cfg.gamma_pv_rep * cfg.c_pv_capital * cfg.delta_pv_deg * s_pv;

  if (rows.size() != pm.vars.steps.size())
    throw ParseError("dispatch CSV has " + std::to_string(rows.size()) +
                     " rows but the model has " +
                     std::to_string(pm.vars.steps.size()) + " steps");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const plan::StepDispatch& r = rows[i];
    const int want =
        pm.vars.step_index(r.year, r.day, r.hour);
    if (want != static_cast<int>(i))
      throw ParseError("dispatch rows must follow model order; row " +
                       std::to_string(i + 1) + " is y" +
                       std::to_string(r.year) + " d" + std::to_string(r.day) +
                       " t" + std::to_string(r.hour));
    const plan::StepVars& sv = pm.vars.steps[i];
    x[sv.p_chg] = r.charge_mw;
    x[sv.p_dchg] = r.discharge_mw;
    x[sv.p_ls] = r.shed_mw;
    x[sv.p_curt] = r.curtail_mw;
    x[sv.e] = r.energy_mwh;
    x[sv.u_chg] = r.charging ? 1.0 : 0.0;
    x[sv.u_dchg] = r.discharging ? 1.0 : 0.0;
    for (std::size_t b = 0; b < sv.u_band.size(); ++b) {
      const bool on = r.band == static_cast<int>(b);
      x[sv.u_band[b]] = on ? 1.0 : 0.0;
      x[sv.w_band[b]] = on ? s_bess : 0.0;
    }
  }
  return x;
}

int cmd_simulate_cell(const CommonArgs& common, const std::string& policy,
                      std::optional<double> rs, std::optional<double> dt) {
  const auto t0 = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "simulate-cell";
  manifest.config_path = common.config_path;
  manifest.inputs.emplace_back(common.config_path,
                               io::file_fingerprint(common.config_path));
  manifest.output_dir = common.out_dir;

  io::RunConfig rc = io::load_config(common.config_path);
  if (rs) rc.pack.r_s = *rs;
  if (dt) rc.pack_dt_s = *dt;
  const cellsim::ChargePolicy pol =
      policy == "constant" ? cellsim::ChargePolicy::constant_c(rc.pack_c_rate)
                           : rc.pack_taper;

  cellsim::ChargeTrace trace =
      cellsim::simulate_charge(rc.pack, pol, rc.pack_soc_start,
                               rc.pack_soc_target, rc.pack_dt_s);

  fs::create_directories(common.out_dir);
  {
    std::ostringstream ss;
    cellsim::write_trace_csv(trace, ss);
    io::write_text_file(common.out_dir + "/trace.csv", ss.str());
  }
  {
    cellsim::SweepRow row;
    row.r_s = rc.pack.r_s;
    row.policy = policy;
    row.terminal_time_s = trace.terminal_time_s;
    row.e_delivered_kwh = trace.e_delivered_kwh;
    row.e_loss_kwh = trace.e_loss_kwh;
    row.e_net_kwh = trace.e_net_kwh;
    row.eta_chg_pct = trace.eta_chg_pct;
    std::ostringstream ss;
    cellsim::write_sweep_csv({row}, ss);
    io::write_text_file(common.out_dir + "/summary.csv", ss.str());
  }
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  io::write_manifest(manifest, common.out_dir + "/manifest.json");

  std::cout << "policy=" << policy << " r_s=" << format_double(rc.pack.r_s)
            << " charge_time_s=" << format_double(trace.terminal_time_s)
            << " eta_pct=" << format_double(trace.eta_chg_pct) << "\n";
  return kOk;
}

int cmd_plan(const CommonArgs& common, const ProfileArgs& pa,
             const SolverArgs& sa, const PlanArgs& pl) {
  const auto t0 = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "plan";
  manifest.config_path = common.config_path;
  manifest.inputs.emplace_back(common.config_path,
                               io::file_fingerprint(common.config_path));
  manifest.output_dir = common.out_dir;
  manifest.solver = to_options(sa);

  io::RunConfig rc = io::load_config(common.config_path);
  Profiles prof = resolve_profiles(pa, manifest);
  plan::PlanModel pm = build_model(rc, prof, pl);
  fs::create_directories(common.out_dir);

  milp::MilpSolution sol;
  if (pl.solver == "mps-bridge" && pl.solution_path.empty()) {
    // first leg of the bridge: hand the model to an external solver
    std::ostringstream model_ss, names_ss;
    mps::write_mps(pm.milp, model_ss);
    mps::write_name_map(pm.milp, names_ss);
    io::write_text_file(common.out_dir + "/model.mps", model_ss.str());
    io::write_text_file(common.out_dir + "/model.names", names_ss.str());
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    io::write_manifest(manifest, common.out_dir + "/manifest.json");
    std::cout << "wrote " << common.out_dir << "/model.mps and model.names; "
              << "rerun with --solution FILE to import the result\n";
    return kOk;
  }
  if (pl.solver == "mps-bridge") {
    // second leg: import, price, and audit the external answer
    manifest.inputs.emplace_back(pl.solution_path,
                                 io::file_fingerprint(pl.solution_path));
    std::istringstream in(io::read_text_file(pl.solution_path));
    sol.values = mps::read_external_solution(in, pm.milp);
    sol.status = milp::SolveStatus::Feasible;
    sol.objective = 0.0;
    for (int j = 0; j < pm.milp.n_cols(); ++j)
      sol.objective += pm.milp.objective[j] * sol.values[j];
  } else {
    sol = milp::solve_milp(pm.milp, to_options(sa));
  }

  plan::PlanSolution ps = plan::extract_solution(pm, rc.plan, prof, sol);
  if (sol.status == milp::SolveStatus::Infeasible ||
      sol.status == milp::SolveStatus::Unbounded) {
    std::cerr << "no usable plan: solver ended " << milp::to_string(sol.status)
              << "\n";
    return kInfeasible;
  }
  if (sol.values.empty()) {
    std::cerr << "solver stopped at " << milp::to_string(sol.status)
              << " without a feasible plan (limits too tight?)\n";
    return kDependency;
  }

  std::vector<plan::Violation> audit =
      plan::check_solution(pm, rc.plan, prof, sol.values);
  io::write_text_file(common.out_dir + "/sizing.csv",
                      render(io::write_sizing_csv, ps));
  io::write_text_file(common.out_dir + "/dispatch.csv",
                      render(io::write_dispatch_csv, ps));
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  io::write_manifest(manifest, common.out_dir + "/manifest.json");

  std::cout << status_line(ps) << "\n";
  if (!audit.empty()) {
    print_violations(audit);
    return kCheckFailed;
  }
  return kOk;
}

int cmd_cases(const CommonArgs& common, const ProfileArgs& pa,
              const SolverArgs& sa) {
  const auto t0 = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "cases";
  manifest.config_path = common.config_path;
  manifest.inputs.emplace_back(common.config_path,
                               io::file_fingerprint(common.config_path));
  manifest.output_dir = common.out_dir;
  manifest.solver = to_options(sa);

  io::RunConfig rc = io::load_config(common.config_path);
  Profiles prof = resolve_profiles(pa, manifest);

  std::array<scenario::CaseOutcome, 4> cs =
      scenario::run_case_study(rc.plan, prof, rc.schedule, to_options(sa));
  std::vector<scenario::CaseOutcome> all(cs.begin(), cs.end());

  fs::create_directories(common.out_dir);
  io::write_text_file(common.out_dir + "/report.csv",
                      scenario::report_csv(rc.plan, prof, all));
  bool any_violation = false;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string stem =
        common.out_dir + "/case" + std::to_string(i + 1) + "_";
    io::write_text_file(stem + "sizing.csv",
                        render(io::write_sizing_csv, all[i].solution));
    io::write_text_file(stem + "dispatch.csv",
                        render(io::write_dispatch_csv, all[i].solution));
    std::cout << all[i].setup.name << ": " << status_line(all[i].solution)
              << "\n";
    if (!all[i].audit.empty()) {
      any_violation = true;
      std::cerr << "audit of " << all[i].setup.name << " failed:\n";
      print_violations(all[i].audit);
    }
  }
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  io::write_manifest(manifest, common.out_dir + "/manifest.json");
  return any_violation ? kCheckFailed : kOk;
}

int cmd_export_mps(const CommonArgs& common, const ProfileArgs& pa,
                   const PlanArgs& pl) {
  const auto t0 = std::chrono::steady_clock::now();
  io::RunManifest manifest;
  manifest.command = "export-mps";
  manifest.config_path = common.config_path;
  manifest.inputs.emplace_back(common.config_path,
                               io::file_fingerprint(common.config_path));
  manifest.output_dir = common.out_dir;

  io::RunConfig rc = io::load_config(common.config_path);
  Profiles prof = resolve_profiles(pa, manifest);
  plan::PlanModel pm = build_model(rc, prof, pl);

  fs::create_directories(common.out_dir);
  std::ostringstream model_ss, names_ss;
  mps::write_mps(pm.milp, model_ss);
  mps::write_name_map(pm.milp, names_ss);
  io::write_text_file(common.out_dir + "/model.mps", model_ss.str());
  io::write_text_file(common.out_dir + "/model.names", names_ss.str());
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  io::write_manifest(manifest, common.out_dir + "/manifest.json");
  std::cout << "wrote " << common.out_dir << "/model.mps ("
            << pm.milp.n_rows() << " rows, " << pm.milp.n_cols()
            << " cols)\n";
  return kOk;
}

int cmd_check(const CommonArgs& common, const ProfileArgs& pa,
              const PlanArgs& pl, const std::string& sizing_path,
              const std::string& dispatch_path) {
  io::RunManifest manifest;  // check writes no outputs; manifest unused
  io::RunConfig rc = io::load_config(common.config_path);
  Profiles prof = resolve_profiles(pa, manifest);
  plan::PlanModel pm = build_model(rc, prof, pl);

  std::vector<double> x =
      assemble_values(pm, rc.plan, io::load_sizing_csv(sizing_path),
                      io::load_dispatch_csv(dispatch_path));
  std::vector<plan::Violation> audit =
      plan::check_solution(pm, rc.plan, prof, x);
  if (audit.empty()) {
    std::cout << "ok: dispatch satisfies every constraint\n";
    return kOk;
  }
  print_violations(audit);
  return kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Microgrid sizing under state-of-charge dependent charging limits.\n"
      "Exit codes: 0 success, 1 audit failure, 2 bad configuration,\n"
      "3 simulation failure, 4 infeasible model, 5 dependency failure."};
  app.require_subcommand(1);

  CommonArgs common;
  ProfileArgs prof_args;
  SolverArgs solver_args;
  PlanArgs plan_args;
  std::string policy = "taper";
  std::optional<double> rs_override, dt_override;
  std::string sizing_path, dispatch_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", common.config_path, "run configuration file")
        ->required();
    cmd->add_option("-o,--out", common.out_dir, "output directory");
  };
  auto add_profile = [&](CLI::App* cmd) {
    cmd->add_option("--profile", prof_args.profile_path,
                    "representative-day CSV (hour,load_mw,pv_cf)");
    cmd->add_flag("--synthetic", prof_args.synthetic,
                  "use the built-in benchmark day");
    cmd->add_option("--years", prof_args.years,
                    "model years the day is tiled over");
  };
  auto add_solver = [&](CLI::App* cmd) {
    cmd->add_option("--time-limit", solver_args.time_limit_s,
                    "solver wall-clock budget, seconds")
        ->envname("TAPERPLAN_TIME_LIMIT");
    cmd->add_option("--gap", solver_args.gap,
                    "relative optimality gap to stop at")
        ->envname("TAPERPLAN_GAP");
    cmd->add_option("--node-limit", solver_args.node_limit,
                    "search-node budget (0 = unlimited)")
        ->envname("TAPERPLAN_NODE_LIMIT");
    cmd->add_option("--threads", solver_args.threads,
                    "solver worker threads")
        ->envname("TAPERPLAN_THREADS");
  };
  auto add_plan_shape = [&](CLI::App* cmd) {
    cmd->add_option("--taper", plan_args.taper,
                    "SOC-band charging limits: on or off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--fix-pv", plan_args.fix_pv, "pin the PV size, MW");
    cmd->add_option("--fix-bess", plan_args.fix_bess,
                    "pin the storage size, MWh");
  };

  CLI::App* sim = app.add_subcommand(
      "simulate-cell", "integrate one pack charge and report time and losses");
  add_common(sim);
  sim->add_option("--policy", policy, "charging policy: constant or taper")
      ->check(CLI::IsMember({"constant", "taper"}));
  sim->add_option("--rs", rs_override, "pack series resistance override, ohm");
  sim->add_option("--dt", dt_override, "integration step override, seconds");

  CLI::App* planc = app.add_subcommand(
      "plan", "size PV and storage against a load profile");
  add_common(planc);
  add_profile(planc);
  add_solver(planc);
  add_plan_shape(planc);
  planc->add_option("--solver", plan_args.solver,
                    "embedded solver or mps-bridge file hand-off")
      ->check(CLI::IsMember({"embedded", "mps-bridge"}));
  planc->add_option("--solution", plan_args.solution_path,
                    "import an external 'name value' solution (mps-bridge)");

  CLI::App* cases = app.add_subcommand(
      "cases", "run the four-case tapering study and write the report");
  add_common(cases);
  add_profile(cases);
  add_solver(cases);

  CLI::App* exportc = app.add_subcommand(
      "export-mps", "write the solver model and its name map");
  add_common(exportc);
  add_profile(exportc);
  add_plan_shape(exportc);

  CLI::App* check = app.add_subcommand(
      "check", "audit a dispatch against the model constraints");
  add_common(check);
  add_profile(check);
  add_plan_shape(check);
  check->add_option("--sizing", sizing_path, "sizing.csv from a plan run")
      ->required();
  check->add_option("--dispatch", dispatch_path, "dispatch.csv from a plan run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (sim->parsed())
      return cmd_simulate_cell(common, policy, rs_override, dt_override);
    if (planc->parsed())
      return cmd_plan(common, prof_args, solver_args, plan_args);
    if (cases->parsed()) return cmd_cases(common, prof_args, solver_args);
    if (exportc->parsed())
      return cmd_export_mps(common, prof_args, plan_args);
    if (check->parsed())
      return cmd_check(common, prof_args, plan_args, sizing_path,
                       dispatch_path);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kSimError;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kDependency;
  }
  return kConfigError;  // unreachable with require_subcommand(1)
}
