#pragma once

// File formats for the command-line tools: the flat key=value run
// configuration, profile and dispatch CSVs, the sizing summary, and the
// JSON run manifest.  Everything renders round-trip exact so repeated runs
// are byte-identical.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "taperplan/cellsim.hpp"
#include "taperplan/domain.hpp"
#include "taperplan/milp.hpp"
#include "taperplan/planmodel.hpp"

namespace taperplan::io {

// Everything one run can configure, parsed from a single file.  Unset keys
// keep the documented defaults; unknown or duplicate keys are rejected.
struct RunConfig {
  PlanningConfig plan;
  TaperSchedule schedule;  // bands = [(lo,hi,beta),...]; default otherwise

  cellsim::PackSpec pack;
  cellsim::ChargePolicy pack_taper = cellsim::ChargePolicy::default_tapered();
  double pack_c_rate = 1.0;  // constant-current policy rate, C
  double pack_soc_start = 0.0;
  double pack_soc_target = 1.0;
  double pack_dt_s = 1.0;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);  // ConfigError if unreadable

// One representative day, "hour,load_mw,pv_cf", hours numbered 1..T in
// order; the day is tiled over the requested model years.
Profiles parse_profile_csv(const std::string& text, int years);
Profiles load_profile_csv(const std::string& path, int years);

// Per-step operating schedule, one row per modeled hour.
void write_dispatch_csv(const plan::PlanSolution& sol, std::ostream& os);
std::vector<plan::StepDispatch> parse_dispatch_csv(const std::string& text);
std::vector<plan::StepDispatch> load_dispatch_csv(const std::string& path);

// Scalar results ("field,value" rows).  Deliberately excludes wall time so
// reruns of the same inputs write identical bytes.
void write_sizing_csv(const plan::PlanSolution& sol, std::ostream& os);
std::map<std::string, std::string> parse_sizing_csv(const std::string& text);
std::map<std::string, std::string> load_sizing_csv(const std::string& path);

// What produced a set of outputs: command, inputs with content hashes,
// solver options, and format versions.  Wall time is the only field allowed
// to differ between identical reruns.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, fnv1a hex
  milp::MilpOptions solver;
  std::string output_dir;
  double wall_time_s = 0.0;
};

std::string manifest_json(const RunManifest& m);
// Writes via a temporary file and rename so readers never see a torn file.
void write_manifest(const RunManifest& m, const std::string& path);

// Hex FNV-1a fingerprint of a file's bytes; ConfigError if unreadable.
std::string file_fingerprint(const std::string& path);

// Slurps a whole file; ConfigError if unreadable.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace taperplan::io
