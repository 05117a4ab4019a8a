// End-to-end tests that drive the command-line binary as a child process.
// The build system passes the binary's location in the TAPERPLAN_BIN
// environment variable; every test works inside its own scratch directory
// under the system temp root.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "taperplan/config_io.hpp"
#include "taperplan/milp.hpp"
#include "taperplan/mps.hpp"
#include "taperplan/planmodel.hpp"
#include "taperplan/scenario.hpp"
#include "taperplan/util.hpp"

namespace fs = std::filesystem;
using namespace taperplan;

namespace {

std::string bin_path() {
  const char* p = std::getenv("TAPERPLAN_BIN");
  REQUIRE_MESSAGE(p != nullptr,
                  "TAPERPLAN_BIN must point at the taperplan binary");
  return p;
}

// Wipes and recreates a named scratch directory, returning its path.
fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "taperplan_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr, interleaved
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() / "taperplan_cli_tests" /
                       ("run" + std::to_string(counter++) + ".log");
  fs::create_directories(log.parent_path());
  const std::string cmd =
      bin_path() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + p.string()).c_str());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

// An empty configuration file selects the built-in benchmark defaults.
fs::path default_config(const fs::path& dir) {
  const fs::path conf = dir / "run.conf";
  write_file(conf, "# benchmark defaults\n");
  return conf;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("missing and malformed inputs exit with the configuration code") {
  const fs::path dir = fresh_dir("badinput");

  RunResult r = run_cli("plan -c /nonexistent/run.conf --synthetic -o " +
                        dir.string());
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "configuration error"));

  // Required --config flag absent.
  r = run_cli("plan --synthetic -o " + dir.string());
  CHECK(r.exit_code == 2);

  // Flag value outside its accepted set.
  const fs::path conf = default_config(dir);
  r = run_cli("plan -c " + conf.string() + " --synthetic --taper sideways -o " +
              dir.string());
  CHECK(r.exit_code == 2);

  // Both profile sources at once.
  r = run_cli("plan -c " + conf.string() + " --synthetic --profile " +
              conf.string() + " -o " + dir.string());
  CHECK(r.exit_code == 2);

  // A config file with an unknown key is rejected, not ignored.
  const fs::path bad = dir / "bad.conf";
  write_file(bad, "mystery_knob = 7\n");
  r = run_cli("plan -c " + bad.string() + " --synthetic -o " + dir.string());
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "mystery_knob"));
}

TEST_CASE("simulate-cell writes a trace and prints the summary line") {
  const fs::path dir = fresh_dir("simcell");
  const fs::path conf = default_config(dir);

  // A lossless pack charged at a constant rate fills in exactly one hour.
  RunResult r = run_cli("simulate-cell -c " + conf.string() +
                        " --policy constant --rs 0 -o " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "policy=constant"));
  CHECK(contains(r.output, "charge_time_s=3600"));
  CHECK(contains(r.output, "eta_pct=100"));
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "manifest.json"));

  const std::string trace = read_file(dir / "trace.csv");
  CHECK(contains(trace, "t_s,soc"));

  // The tapered policy takes longer than the constant one.
  const fs::path dir2 = fresh_dir("simcell_taper");
  r = run_cli("simulate-cell -c " + conf.string() + " --policy taper -o " +
              dir2.string());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "policy=taper"));
  CHECK(contains(r.output, "charge_time_s=6300"));
}

TEST_CASE("plan produces a sizing sheet, dispatch log, and manifest") {
  const fs::path dir = fresh_dir("plan");
  const fs::path conf = default_config(dir);

  RunResult r = run_cli("plan -c " + conf.string() +
                        " --synthetic --years 1 -o " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "status=optimal"));

  const std::string sizing = read_file(dir / "sizing.csv");
  CHECK(contains(sizing, "field,value"));
  CHECK(contains(sizing, "status,optimal"));
  CHECK(contains(sizing, "s_pv_mw,"));
  CHECK(contains(sizing, "s_bess_mwh,"));

  const std::string dispatch = read_file(dir / "dispatch.csv");
  CHECK(contains(dispatch,
                 "y,d,t,charge_mw,discharge_mw,shed_mw,curtail_mw,energy_mwh,"
                 "soc,band,charging,discharging"));

  const std::string manifest = read_file(dir / "manifest.json");
  CHECK(contains(manifest, "\"command\": \"plan\""));
  CHECK(contains(manifest, "\"wall_time_s\""));
}

TEST_CASE("plan runs are byte-for-byte repeatable") {
  const fs::path dir1 = fresh_dir("repeat1");
  const fs::path dir2 = fresh_dir("repeat2");
  const fs::path conf = default_config(dir1);

  RunResult r1 = run_cli("plan -c " + conf.string() +
                         " --synthetic --years 1 -o " + dir1.string());
  RunResult r2 = run_cli("plan -c " + conf.string() +
                         " --synthetic --years 1 -o " + dir2.string());
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(read_file(dir1 / "dispatch.csv") == read_file(dir2 / "dispatch.csv"));
  CHECK(read_file(dir1 / "sizing.csv") == read_file(dir2 / "sizing.csv"));
}

TEST_CASE("a profile file reproduces the synthetic benchmark run") {
  const fs::path dir = fresh_dir("profile");
  const fs::path conf = default_config(dir);

  // Write the built-in benchmark day out as a profile CSV.
  const Profiles prof = scenario::benchmark_profiles(1);
  std::ostringstream csv;
  csv << "hour,load_mw,pv_cf\n";
  for (int t = 1; t <= prof.hours; ++t)
    csv << t << ',' << format_double(prof.load_at(1, 1, t)) << ','
        << format_double(prof.pv_at(1, 1, t)) << '\n';
  const fs::path profile = dir / "day.csv";
  write_file(profile, csv.str());

  const fs::path from_file = fresh_dir("profile_file");
  const fs::path from_builtin = fresh_dir("profile_builtin");
  RunResult r1 = run_cli("plan -c " + conf.string() + " --profile " +
                         profile.string() + " --years 1 -o " +
                         from_file.string());
  RunResult r2 = run_cli("plan -c " + conf.string() +
                         " --synthetic --years 1 -o " + from_builtin.string());
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(read_file(from_file / "dispatch.csv") ==
        read_file(from_builtin / "dispatch.csv"));
}

TEST_CASE("check accepts a clean run and rejects a tampered one") {
  const fs::path dir = fresh_dir("check");
  const fs::path conf = default_config(dir);

  RunResult r = run_cli("plan -c " + conf.string() +
                        " --synthetic --years 1 -o " + dir.string());
  REQUIRE(r.exit_code == 0);

  const std::string sizing = (dir / "sizing.csv").string();
  const std::string dispatch = (dir / "dispatch.csv").string();
  r = run_cli("check -c " + conf.string() + " --synthetic --years 1 --sizing " +
              sizing + " --dispatch " + dispatch);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "ok"));

  // Shrink the reported PV size; the recorded dispatch no longer balances.
  std::string text = read_file(dir / "sizing.csv");
  const std::size_t pos = text.find("s_pv_mw,");
  REQUIRE(pos != std::string::npos);
  const std::size_t eol = text.find('\n', pos);
  text.replace(pos, eol - pos, "s_pv_mw,0.1");
  write_file(dir / "sizing.csv", text);

  r = run_cli("check -c " + conf.string() + " --synthetic --years 1 --sizing " +
              sizing + " --dispatch " + dispatch);
  CHECK(r.exit_code == 1);
  CHECK(contains(r.output, "violation"));
}

TEST_CASE("case study emits the comparison report") {
  const fs::path dir = fresh_dir("cases");
  const fs::path conf = default_config(dir);

  RunResult r = run_cli("cases -c " + conf.string() +
                        " --synthetic --years 1 -o " + dir.string());
  CHECK(r.exit_code == 0);

  const std::string report = read_file(dir / "report.csv");
  CHECK(contains(report,
                 "metric,aware_plan,blind_plan,blind_dispatch_aware_sizes,"
                 "aware_dispatch_blind_sizes"));
  CHECK(contains(report, "objective_cost,"));
  CHECK(contains(report, "total_load_mwh,6570,6570,6570,6570"));
  CHECK(contains(report, "(fixed)"));
  for (int i = 1; i <= 4; ++i) {
    CHECK(fs::exists(dir / ("case" + std::to_string(i) + "_sizing.csv")));
    CHECK(fs::exists(dir / ("case" + std::to_string(i) + "_dispatch.csv")));
  }
}

TEST_CASE("export-mps writes a model the importer can read back") {
  const fs::path dir = fresh_dir("export");
  const fs::path conf = default_config(dir);

  RunResult r = run_cli("export-mps -c " + conf.string() +
                        " --synthetic --years 1 --taper on -o " + dir.string());
  CHECK(r.exit_code == 0);

  std::ifstream in(dir / "model.mps");
  REQUIRE(in.good());
  const milp::SparseMilp parsed = mps::read_mps(in);

  // Rebuild the same model in-process and compare shapes.
  io::RunConfig rc = io::load_config(conf.string());
  const Profiles prof = scenario::benchmark_profiles(1);
  plan::PlanModel pm = plan::build_baseline(rc.plan, prof);
  plan::add_tapering(pm, rc.plan, rc.schedule);
  CHECK(parsed.n_cols() == pm.milp.n_cols());
  CHECK(parsed.n_rows() == pm.milp.n_rows());

  const std::string names = read_file(dir / "model.names");
  CHECK(contains(names, "S_pv"));
  CHECK(contains(names, "S_bess"));
}

TEST_CASE("mps-bridge round trip reprices the embedded solution") {
  const fs::path dir = fresh_dir("bridge");
  const fs::path conf = default_config(dir);

  // First leg: emit the model files instead of solving.
  RunResult r = run_cli("plan -c " + conf.string() +
                        " --synthetic --years 1 --taper off"
                        " --solver mps-bridge -o " +
                        dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "--solution"));
  CHECK(fs::exists(dir / "model.mps"));
  CHECK(fs::exists(dir / "model.names"));

  // Stand in for the external solver with the library's own optimizer.
  io::RunConfig rc = io::load_config(conf.string());
  const Profiles prof = scenario::benchmark_profiles(1);
  plan::PlanModel pm = plan::build_baseline(rc.plan, prof);
  const milp::MilpSolution sol = milp::solve_milp(pm.milp);
  REQUIRE(sol.status == milp::SolveStatus::Optimal);
  std::ostringstream lines;
  for (int j = 0; j < pm.milp.n_cols(); ++j)
    lines << pm.milp.col_names[j] << ' ' << format_double(sol.values[j])
          << '\n';
  const fs::path answer = dir / "solution.txt";
  write_file(answer, lines.str());

  // Second leg: import, audit, and price the external answer.
  r = run_cli("plan -c " + conf.string() +
              " --synthetic --years 1 --taper off"
              " --solver mps-bridge --solution " +
              answer.string() + " -o " + dir.string());
  CHECK(r.exit_code == 0);

  const std::string sizing = read_file(dir / "sizing.csv");
  const std::size_t pos = sizing.find("objective,");
  REQUIRE(pos != std::string::npos);
  const std::size_t eol = sizing.find('\n', pos);
  const double priced =
      std::stod(sizing.substr(pos + 10, eol - pos - 10));
  CHECK(priced == doctest::Approx(sol.objective).epsilon(1e-12));
}
