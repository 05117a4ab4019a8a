#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace taperplan {

// Which energy level a charging-power band is evaluated against.
enum class BandReference { EndOfInterval, StartOfInterval };

// One SOC band [tau_lower, tau_upper] and the charge-power derating factor
// that applies while the battery sits inside it.
struct TaperBand {
  double tau_lower = 0.0;
  double tau_upper = 1.0;
  double beta = 1.0;
};

// Bands must tile [soc_min, soc_max] without gaps, with non-increasing beta
// and beta = 1 on the first (bulk) band.
struct TaperSchedule {
  std::vector<TaperBand> bands;

  std::size_t band_count() const { return bands.size(); }

  // Full-range single band at beta = 1: charging behaves exactly like the
  // untapered model.
  static TaperSchedule single_band(double soc_min, double soc_max);

  // Bulk charge up to 80% SOC, then derate to 0.5 / 0.2 / 0.1 above
  // 80 / 90 / 95%.  Thresholds are clipped to [soc_min, soc_max] and empty
  // bands are dropped.
  static TaperSchedule default_schedule(double soc_min, double soc_max);
};

struct PlanningConfig {
  double c_pv_capital = 1.0e6;    // $/MW installed PV
  double c_bess_capital = 2.5e5;  // $/MWh installed storage
  double gamma_pv_rep = 0.1;      // PV replacement share per degradation step
  double t_chg = 4.0;             // full-charge duration at rated power, h
  double t_dchg = 4.0;            // full-discharge duration, h
  double eta_chg = 0.95;          // charge efficiency
  double eta_dchg = 0.95;         // discharge efficiency
  double eta_pv_init = 1.0;       // first-year PV conversion efficiency
  double delta_pv_deg = 0.01;     // annual PV degradation rate
  double soc_min = 0.1;
  double soc_max = 1.0;
  double c_ls_penalty = 1.0e4;    // $/MWh shed
  double y_mg = 25.0;             // planning horizon in years
  double alpha = 365.0;           // occurrences of each profile day per model year
  double m_soc = 1.0;             // big-M for SOC-side logic, >= 1
  double m_bess = 10.0;           // big-M charge/discharge power, MW
  double s_bess_max = 30.0;       // storage sizing cap, MWh
  double s_pv_max = 10.0;         // PV sizing cap, MW
  // Engaged: E_init = fraction * S_bess.  Disengaged: E_init is free.
  std::optional<double> init_soc_fraction = 0.5;
  BandReference band_reference = BandReference::EndOfInterval;
  bool terminal_soc_constraint = false;
};

// Load and PV capacity-factor series over explicit model years, representative
// days and hourly steps, flattened year-major.
struct Profiles {
  int years = 0;
  int days = 0;
  int hours = 0;
  std::vector<double> load;   // MW
  std::vector<double> pv_cf;  // dimensionless, in [0, 1]

  // Coordinates are 1-based: year 1..years, day 1..days, hour 1..hours.
  std::size_t index(int y, int d, int t) const {
    return (static_cast<std::size_t>(y - 1) * days + (d - 1)) * hours +
           (t - 1);
  }
  double load_at(int y, int d, int t) const { return load[index(y, d, t)]; }
  double pv_at(int y, int d, int t) const { return pv_cf[index(y, d, t)]; }
  std::size_t size() const {
    return static_cast<std::size_t>(years) * days * hours;
  }
};

// Every violated rule as a human-readable sentence naming the offending
// field.  Empty means the pair is usable.
std::vector<std::string> validate_config(const PlanningConfig& cfg,
                                         const TaperSchedule& sched);

std::vector<std::string> validate_profiles(const Profiles& prof);

// Year-y PV conversion efficiency: eta_pv_init derated by delta_pv_deg
// compounded over y-1 years.  year counts from 1; smaller throws.
double pv_efficiency(const PlanningConfig& cfg, int year);

}  // namespace taperplan
