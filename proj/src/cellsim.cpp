#include "taperplan/cellsim.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "taperplan/errors.hpp"
#include "taperplan/util.hpp"

namespace taperplan::cellsim {

namespace {

constexpr double kMaxDt = 10.0;
constexpr double kJoulePerKwh = 3.6e6;

void validate_steps(const std::vector<PolicyStep>& steps) {
  if (steps.empty())
    throw ConfigError("charge policy needs at least one step");
  if (steps.front().soc_threshold != 0.0)
    throw ConfigError("first policy step must start at SOC 0");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i].c_rate > 0.0))
      throw ConfigError("policy step " + std::to_string(i + 1) +
                        " rate must be > 0");
    if (!(steps[i].soc_threshold >= 0.0 && steps[i].soc_threshold < 1.0))
      throw ConfigError("policy step " + std::to_string(i + 1) +
                        " threshold must lie in [0, 1)");
    if (i > 0 && !(steps[i].soc_threshold > steps[i - 1].soc_threshold))
      throw ConfigError("policy step thresholds must be strictly increasing");
  }
}

void validate_pack(const PackSpec& pack) {
  if (!(pack.capacity_ah > 0.0))
    throw ConfigError("pack capacity_ah must be > 0");
  if (pack.n_series < 1) throw ConfigError("pack n_series must be >= 1");
  if (!(pack.v_cell_nominal > 0.0))
    throw ConfigError("pack v_cell_nominal must be > 0");
  if (!(pack.r_s >= 0.0)) throw ConfigError("pack r_s must be >= 0");
}

}  // namespace

ChargePolicy ChargePolicy::constant_c(double c_rate) {
  ChargePolicy p;
  p.steps.push_back({0.0, c_rate});
  validate_steps(p.steps);
  return p;
}

ChargePolicy ChargePolicy::tapered(std::vector<PolicyStep> steps) {
  ChargePolicy p;
  p.steps = std::move(steps);
  validate_steps(p.steps);
  return p;
}

ChargePolicy ChargePolicy::default_tapered() {
  return tapered({{0.0, 1.0}, {0.80, 0.5}, {0.90, 0.2}, {0.95, 0.1}});
}

double ChargePolicy::rate_at(double soc) const {
  double rate = steps.empty() ? 0.0 : steps.front().c_rate;
  for (const PolicyStep& s : steps) {
    if (s.soc_threshold <= soc) rate = s.c_rate;
  }
  return rate;
}

ChargeTrace simulate_charge(const PackSpec& pack, const ChargePolicy& policy,
                            double soc0, double soc_target, double dt) {
  validate_pack(pack);
  if (policy.steps.empty()) throw ConfigError("charge policy has no steps");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (dt > kMaxDt)
    throw ConfigError("dt above " + format_double(kMaxDt) +
                      " s loses too much precision, got " + format_double(dt));
  if (!(soc0 >= 0.0 && soc0 < soc_target && soc_target <= 1.0))
    throw ConfigError("need 0 <= soc0 < soc_target <= 1, got soc0=" +
                      format_double(soc0) + " soc_target=" +
                      format_double(soc_target));

  const double v_oc = pack.n_series * pack.v_cell_nominal;

  ChargeTrace trace;
  trace.dt = dt;
  // Generous step budget: the slowest admissible rate with some slack.
  double min_rate = policy.steps.front().c_rate;
  for (const PolicyStep& s : policy.steps) min_rate = std::min(min_rate, s.c_rate);
  const std::size_t max_steps =
      min_rate > 0.0
          ? static_cast<std::size_t>(3600.0 / dt / min_rate * 1.1) + 16
          : 0;
  trace.samples.reserve(std::min<std::size_t>(max_steps, 1u << 20));

  double soc = soc0;
  double t = 0.0;
  double e_delivered_j = 0.0;
  double e_loss_j = 0.0;
  std::size_t steps = 0;

  while (soc < soc_target) {
    if (steps++ > max_steps)
      throw SimulationError("charge did not reach target SOC within " +
                            std::to_string(max_steps) + " steps");
    const double rate = policy.rate_at(soc);
    if (!(rate > 0.0))
      throw SimulationError("charge stalled: policy rate is " +
                            format_double(rate) + " at SOC " +
                            format_double(soc));
    const double i = rate * pack.capacity_ah;           // A
    const double v = v_oc + i * pack.r_s;               // V at terminals
    const double p_loss = i * i * pack.r_s;             // W
    soc += i * dt / (3600.0 * pack.capacity_ah);
    t += dt;
    e_delivered_j += v * i * dt;
    e_loss_j += p_loss * dt;
    trace.samples.push_back({t, soc, i, v, p_loss});
  }

  trace.terminal_time_s = t;
  trace.e_delivered_kwh = e_delivered_j / kJoulePerKwh;
  trace.e_loss_kwh = e_loss_j / kJoulePerKwh;
  trace.e_net_kwh = trace.e_delivered_kwh - trace.e_loss_kwh;
  trace.eta_chg_pct = trace.e_delivered_kwh > 0.0
                          ? 100.0 * trace.e_net_kwh / trace.e_delivered_kwh
                          : 100.0;
  return trace;
}

PolicyComparison compare_policies(const PackSpec& pack, const ChargePolicy& a,
                                  const ChargePolicy& b, double soc0,
                                  double soc_target, double dt) {
  ChargeTrace ta = simulate_charge(pack, a, soc0, soc_target, dt);
  ChargeTrace tb = simulate_charge(pack, b, soc0, soc_target, dt);
  return {ta.e_loss_kwh - tb.e_loss_kwh, tb.eta_chg_pct - ta.eta_chg_pct};
}

std::vector<SweepRow> sweep_resistance(
    const PackSpec& base, const std::vector<double>& r_values,
    const std::vector<std::pair<std::string, ChargePolicy>>& policies,
    double soc0, double soc_target, double dt) {
  std::vector<SweepRow> rows;
  rows.reserve(r_values.size() * policies.size());
  for (double r : r_values) {
    PackSpec pack = base;
    pack.r_s = r;
    for (const auto& [name, policy] : policies) {
      ChargeTrace tr = simulate_charge(pack, policy, soc0, soc_target, dt);
      rows.push_back({r, name, tr.terminal_time_s, tr.e_delivered_kwh,
                      tr.e_loss_kwh, tr.e_net_kwh, tr.eta_chg_pct});
    }
  }
  return rows;
}

void write_trace_csv(const ChargeTrace& trace, std::ostream& os) {
  os << "t_s,soc,i_a,v_v,p_loss_w\n";
  for (const TraceSample& s : trace.samples) {
    os << format_double(s.t) << ',' << format_double(s.soc) << ','
       << format_double(s.i_pack) << ',' << format_double(s.v_pack) << ','
       << format_double(s.p_loss) << '\n';
  }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "r_s_ohm,policy,charging_time_s,e_delivered_kwh,e_loss_kwh,"
        "e_net_kwh,eta_chg_pct\n";
  for (const SweepRow& r : rows) {
    os << format_double(r.r_s) << ',' << r.policy << ','
       << format_double(r.terminal_time_s) << ','
       << format_double(r.e_delivered_kwh) << ','
       << format_double(r.e_loss_kwh) << ',' << format_double(r.e_net_kwh)
       << ',' << format_double(r.eta_chg_pct) << '\n';
  }
}

}  // namespace taperplan::cellsim
