#include "taperplan/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "taperplan/errors.hpp"
#include "taperplan/util.hpp"

namespace taperplan::io {

namespace {

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError(key + " is not a number: '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError(key + " is not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(key + " must be true or false, got '" + text + "'");
}

// Tuple-list syntax shared by taper bands and pack policy steps:
// [(a,b,c),(d,e,f)] with any amount of whitespace.
std::vector<std::vector<double>> parse_tuple_list(const std::string& key,
                                                  const std::string& text,
                                                  std::size_t arity) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ConfigError(key + " must look like [(..),(..)], got '" + text + "'");
  s = s.substr(1, s.size() - 2);

  std::vector<std::vector<double>> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] == ',') {  // separator between tuples
      ++pos;
      continue;
    }
    if (s[pos] != '(')
      throw ConfigError(key + ": expected '(' at '" + s.substr(pos) + "'");
    auto close = s.find(')', pos);
    if (close == std::string::npos)
      throw ConfigError(key + ": unclosed '(' in '" + text + "'");
    std::vector<std::string> parts = split(s.substr(pos + 1, close - pos - 1), ',');
    if (parts.size() != arity)
      throw ConfigError(key + ": each entry needs " + std::to_string(arity) +
                        " numbers, got '" + s.substr(pos, close - pos + 1) +
                        "'");
    std::vector<double> tup;
    for (const std::string& p : parts) tup.push_back(parse_number(key, p));
    out.push_back(std::move(tup));
    pos = close + 1;
  }
  if (out.empty()) throw ConfigError(key + " lists at least one entry");
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  // gather key = value pairs first so key order never matters
  std::map<std::string, std::string> kv;
  int lineno = 0;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        " is not key = value: '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + " has no key");
    if (!kv.emplace(key, val).second)
      throw ConfigError("duplicate key '" + key + "' on line " +
                        std::to_string(lineno));
  }

  RunConfig rc;
  std::set<std::string> seen;
  auto take = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    seen.insert(key);
    return &it->second;
  };
  auto num = [&](const char* key, double& dst) {
    if (const std::string* v = take(key)) dst = parse_number(key, *v);
  };

  PlanningConfig& p = rc.plan;
  num("c_pv_capital", p.c_pv_capital);
  num("c_bess_capital", p.c_bess_capital);
  num("gamma_pv_rep", p.gamma_pv_rep);
  num("t_chg", p.t_chg);
  num("t_dchg", p.t_dchg);
  num("eta_chg", p.eta_chg);
  num("eta_dchg", p.eta_dchg);
  num("eta_pv_init", p.eta_pv_init);
  num("delta_pv_deg", p.delta_pv_deg);
  num("soc_min", p.soc_min);
  num("soc_max", p.soc_max);
  num("c_ls_penalty", p.c_ls_penalty);
  num("y_mg", p.y_mg);
  num("alpha", p.alpha);
  num("m_soc", p.m_soc);
  num("m_bess", p.m_bess);
  num("s_bess_max", p.s_bess_max);
  num("s_pv_max", p.s_pv_max);

  if (const std::string* v = take("init_soc_mode")) {
    if (*v == "free") {
      p.init_soc_fraction.reset();
    } else if (v->rfind("fixed:", 0) == 0) {
      p.init_soc_fraction = parse_number("init_soc_mode", v->substr(6));
    } else {
      throw ConfigError("init_soc_mode must be free or fixed:<fraction>, got '" +
                        *v + "'");
    }
  }
  if (const std::string* v = take("band_reference")) {
    if (*v == "end") p.band_reference = BandReference::EndOfInterval;
    else if (*v == "start") p.band_reference = BandReference::StartOfInterval;
    else
      throw ConfigError("band_reference must be end or start, got '" + *v +
                        "'");
  }
  if (const std::string* v = take("terminal_soc_constraint"))
    p.terminal_soc_constraint = parse_bool("terminal_soc_constraint", *v);

  if (const std::string* v = take("bands")) {
    rc.schedule.bands.clear();
    for (const auto& tup : parse_tuple_list("bands", *v, 3))
      rc.schedule.bands.push_back({tup[0], tup[1], tup[2]});
  } else {
    rc.schedule = TaperSchedule::default_schedule(p.soc_min, p.soc_max);
  }

  num("pack_capacity_ah", rc.pack.capacity_ah);
  if (const std::string* v = take("pack_n_series"))
    rc.pack.n_series = parse_int("pack_n_series", *v);
  num("pack_v_cell", rc.pack.v_cell_nominal);
  num("pack_r_s", rc.pack.r_s);
  num("pack_c_rate", rc.pack_c_rate);
  num("pack_soc_start", rc.pack_soc_start);
  num("pack_soc_target", rc.pack_soc_target);
  num("pack_dt_s", rc.pack_dt_s);
  if (const std::string* v = take("pack_taper_steps")) {
    std::vector<cellsim::PolicyStep> steps;
    for (const auto& tup : parse_tuple_list("pack_taper_steps", *v, 2))
      steps.push_back({tup[0], tup[1]});
    rc.pack_taper = cellsim::ChargePolicy::tapered(std::move(steps));
  }

  for (const auto& [key, val] : kv)
    if (!seen.count(key)) throw ConfigError("unknown key '" + key + "'");
  return rc;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path));
}

Profiles parse_profile_csv(const std::string& text, int years) {
  if (years < 1)
    throw ConfigError("profiles need at least one model year, got " +
                      std::to_string(years));
  std::vector<std::string> lines = split(text, '\n');
  std::size_t i = 0;
  auto next_line = [&]() -> const std::string* {
    while (i < lines.size()) {
      const std::string& l = lines[i];
      ++i;
      if (!trim(l).empty()) return &l;
    }
    return nullptr;
  };
  const std::string* header = next_line();
  if (!header || trim(*header) != "hour,load_mw,pv_cf")
    throw ParseError("profile CSV must start with 'hour,load_mw,pv_cf'");

  std::vector<double> day_load, day_cf;
  int hour = 0;
  while (const std::string* l = next_line()) {
    std::vector<std::string> f = split(trim(*l), ',');
    if (f.size() != 3)
      throw ParseError("profile row needs 3 fields: '" + *l + "'");
    ++hour;
    if (parse_int("hour", f[0]) != hour)
      throw ParseError("profile hours must run 1..T in order; expected " +
                       std::to_string(hour) + ", got '" + f[0] + "'");
    const double load = parse_number("load_mw", f[1]);
    const double cf = parse_number("pv_cf", f[2]);
    if (load < 0.0) throw ParseError("load_mw must be >= 0 at hour " +
                                     std::to_string(hour));
    if (cf < 0.0 || cf > 1.0)
      throw ParseError("pv_cf must lie in [0, 1] at hour " +
                       std::to_string(hour));
    day_load.push_back(load);
    day_cf.push_back(cf);
  }
  if (day_load.empty()) throw ParseError("profile CSV has no data rows");

  Profiles prof;
  prof.years = years;
  prof.days = 1;
  prof.hours = hour;
  prof.load.reserve(static_cast<std::size_t>(years) * hour);
  prof.pv_cf.reserve(static_cast<std::size_t>(years) * hour);
  for (int y = 0; y < years; ++y) {
    prof.load.insert(prof.load.end(), day_load.begin(), day_load.end());
    prof.pv_cf.insert(prof.pv_cf.end(), day_cf.begin(), day_cf.end());
  }
  return prof;
}

Profiles load_profile_csv(const std::string& path, int years) {
  return parse_profile_csv(read_text_file(path), years);
}

void write_dispatch_csv(const plan::PlanSolution& sol, std::ostream& os) {
  os << "y,d,t,charge_mw,discharge_mw,shed_mw,curtail_mw,energy_mwh,soc,"
        "band,charging,discharging\n";
  for (const plan::StepDispatch& s : sol.dispatch) {
    os << s.year << ',' << s.day << ',' << s.hour << ','
       << format_double(s.charge_mw) << ',' << format_double(s.discharge_mw)
       << ',' << format_double(s.shed_mw) << ',' << format_double(s.curtail_mw)
       << ',' << format_double(s.energy_mwh) << ',' << format_double(s.soc)
       << ',' << s.band << ',' << (s.charging ? 1 : 0) << ','
       << (s.discharging ? 1 : 0) << '\n';
  }
}

std::vector<plan::StepDispatch> parse_dispatch_csv(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size() ||
      trim(lines[i]) !=
          "y,d,t,charge_mw,discharge_mw,shed_mw,curtail_mw,energy_mwh,soc,"
          "band,charging,discharging")
    throw ParseError("dispatch CSV header missing or unrecognized");
  ++i;

  std::vector<plan::StepDispatch> out;
  for (; i < lines.size(); ++i) {
    const std::string row = trim(lines[i]);
    if (row.empty()) continue;
    std::vector<std::string> f = split(row, ',');
    if (f.size() != 12)
      throw ParseError("dispatch row needs 12 fields: '" + row + "'");
    plan::StepDispatch s;
    s.year = parse_int("y", f[0]);
    s.day = parse_int("d", f[1]);
    s.hour = parse_int("t", f[2]);
    s.charge_mw = parse_number("charge_mw", f[3]);
    s.discharge_mw = parse_number("discharge_mw", f[4]);
    s.shed_mw = parse_number("shed_mw", f[5]);
    s.curtail_mw = parse_number("curtail_mw", f[6]);
    s.energy_mwh = parse_number("energy_mwh", f[7]);
    s.soc = parse_number("soc", f[8]);
    s.band = parse_int("band", f[9]);
    s.charging = parse_int("charging", f[10]) != 0;
    s.discharging = parse_int("discharging", f[11]) != 0;
    out.push_back(s);
  }
  if (out.empty()) throw ParseError("dispatch CSV has no data rows");
  return out;
}

std::vector<plan::StepDispatch> load_dispatch_csv(const std::string& path) {
  return parse_dispatch_csv(read_text_file(path));
}

void write_sizing_csv(const plan::PlanSolution& sol, std::ostream& os) {
  os << "field,value\n";
  os << "status," << milp::to_string(sol.status) << '\n';
  os << "objective," << format_double(sol.objective) << '\n';
  os << "s_pv_mw," << format_double(sol.s_pv_mw) << '\n';
  os << "s_bess_mwh," << format_double(sol.s_bess_mwh) << '\n';
  os << "e_init_mwh," << format_double(sol.e_init_mwh) << '\n';
  os << "pv_deg_cost," << format_double(sol.pv_deg_cost) << '\n';
  os << "shed_mwh," << format_double(sol.shed_mwh) << '\n';
  os << "curtailed_mwh," << format_double(sol.curtailed_mwh) << '\n';
  os << "nodes," << sol.nodes << '\n';
}

std::map<std::string, std::string> parse_sizing_csv(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size() || trim(lines[i]) != "field,value")
    throw ParseError("sizing CSV must start with 'field,value'");
  std::map<std::string, std::string> out;
  for (++i; i < lines.size(); ++i) {
    const std::string row = trim(lines[i]);
    if (row.empty()) continue;
    auto comma = row.find(',');
    if (comma == std::string::npos)
      throw ParseError("sizing row needs 2 fields: '" + row + "'");
    out[row.substr(0, comma)] = row.substr(comma + 1);
  }
  return out;
}

std::map<std::string, std::string> load_sizing_csv(const std::string& path) {
  return parse_sizing_csv(read_text_file(path));
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config_path;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : m.inputs)
    inputs.push_back({{"path", path}, {"fnv1a", hash}});
  j["inputs"] = inputs;
  j["solver"] = {{"gap_tol", m.solver.gap_tol},
                 {"time_limit_s", m.solver.time_limit_s},
                 {"node_limit", m.solver.node_limit},
                 {"integrality_tol", m.solver.integrality_tol},
                 {"threads", m.solver.threads}};
  j["output_dir"] = m.output_dir;
  j["wall_time_s"] = m.wall_time_s;
  j["versions"] = {{"taperplan", "0.1.0"},
                   {"config", 1},
                   {"profile_csv", 1},
                   {"dispatch_csv", 1},
                   {"sizing_csv", 1},
                   {"report_csv", 1},
                   {"manifest", 1}};
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& path) {
  const std::string tmp = path + ".tmp";
  write_text_file(tmp, manifest_json(m));
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot move manifest into place at " + path);
}

std::string file_fingerprint(const std::string& path) {
  const std::string bytes = read_text_file(path);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a(bytes.data(), bytes.size())));
  return std::string(buf);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ConfigError("error while reading " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  out.close();
  if (!out) throw ConfigError("error while writing " + path);
}

}  // namespace taperplan::io
