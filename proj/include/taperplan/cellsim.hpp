#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace taperplan::cellsim {

// Series string of identical cells with one lumped ohmic resistance for the
// whole pack.
struct PackSpec {
  double capacity_ah = 100.0;
  int n_series = 40;
  double v_cell_nominal = 3.7;  // V, treated as a constant open-circuit voltage
  double r_s = 0.0;             // pack series resistance, ohm
};

// Piecewise-constant C-rate over SOC: the step with the highest threshold
// not exceeding the current SOC applies.
struct PolicyStep {
  double soc_threshold = 0.0;
  double c_rate = 1.0;
};

struct ChargePolicy {
  std::vector<PolicyStep> steps;

  static ChargePolicy constant_c(double c_rate);
  static ChargePolicy tapered(std::vector<PolicyStep> steps);
  // Step-down profile used throughout: 1C bulk, then 0.5C / 0.2C / 0.1C
  // above 80 / 90 / 95% SOC.
  static ChargePolicy default_tapered();

  double rate_at(double soc) const;
  bool single_rate() const { return steps.size() == 1; }
};

struct TraceSample {
  double t = 0.0;       // s, end of the step
  double soc = 0.0;     // after the step
  double i_pack = 0.0;  // A, during the step
  double v_pack = 0.0;  // V, terminal voltage during the step
  double p_loss = 0.0;  // W, ohmic loss during the step
};

struct ChargeTrace {
  double dt = 1.0;
  std::vector<TraceSample> samples;
  double terminal_time_s = 0.0;
  double e_delivered_kwh = 0.0;  // energy into the pack terminals
  double e_loss_kwh = 0.0;       // ohmic dissipation
  double e_net_kwh = 0.0;        // delivered minus loss
  double eta_chg_pct = 0.0;      // net / delivered * 100
};

struct PolicyComparison {
  double delta_e_loss_kwh = 0.0;  // loss(a) - loss(b)
  double eta_gain_pp = 0.0;       // eta(b) - eta(a), percentage points
};

struct SweepRow {
  double r_s = 0.0;
  std::string policy;
  double terminal_time_s = 0.0;
  double e_delivered_kwh = 0.0;
  double e_loss_kwh = 0.0;
  double e_net_kwh = 0.0;
  double eta_chg_pct = 0.0;
};

// Fixed-step integration from soc0 up to soc_target.  dt must be positive
// and at most 10 s; the trace ends at the first step that reaches the
// target.  Throws SimulationError if the active policy rate is not positive
// (the charge would stall).
ChargeTrace simulate_charge(const PackSpec& pack, const ChargePolicy& policy,
                            double soc0, double soc_target, double dt = 1.0);

PolicyComparison compare_policies(const PackSpec& pack, const ChargePolicy& a,
                                  const ChargePolicy& b, double soc0,
                                  double soc_target, double dt = 1.0);

std::vector<SweepRow> sweep_resistance(
    const PackSpec& base, const std::vector<double>& r_values,
    const std::vector<std::pair<std::string, ChargePolicy>>& policies,
    double soc0, double soc_target, double dt = 1.0);

void write_trace_csv(const ChargeTrace& trace, std::ostream& os);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

}  // namespace taperplan::cellsim
