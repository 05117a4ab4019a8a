#include "taperplan/domain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace taperplan {

namespace {

constexpr double kBandTol = 1e-9;

void add(std::vector<std::string>& out, const std::string& msg) {
  out.push_back(msg);
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

TaperSchedule TaperSchedule::single_band(double soc_min, double soc_max) {
  TaperSchedule s;
  s.bands.push_back({soc_min, soc_max, 1.0});
  return s;
}

TaperSchedule TaperSchedule::default_schedule(double soc_min, double soc_max) {
  const double thresholds[] = {0.80, 0.90, 0.95};
  const double betas[] = {1.0, 0.5, 0.2, 0.1};
  TaperSchedule s;
  double lo = soc_min;
  for (int b = 0; b < 4; ++b) {
    double hi = (b < 3) ? thresholds[b] : soc_max;
    if (hi > soc_max) hi = soc_max;
    if (hi > lo + kBandTol) {
      s.bands.push_back({lo, hi, betas[b]});
      lo = hi;
    }
  }
  if (s.bands.empty()) s.bands.push_back({soc_min, soc_max, 1.0});
  s.bands.back().tau_upper = soc_max;
  return s;
}

std::vector<std::string> validate_config(const PlanningConfig& cfg,
                                         const TaperSchedule& sched) {
  std::vector<std::string> v;

  auto positive = [&](double x, const char* name) {
    if (!(x > 0.0)) add(v, std::string(name) + " must be > 0, got " + num(x));
  };
  auto nonneg = [&](double x, const char* name) {
    if (!(x >= 0.0)) add(v, std::string(name) + " must be >= 0, got " + num(x));
  };

  nonneg(cfg.c_pv_capital, "c_pv_capital");
  nonneg(cfg.c_bess_capital, "c_bess_capital");
  nonneg(cfg.gamma_pv_rep, "gamma_pv_rep");
  nonneg(cfg.c_ls_penalty, "c_ls_penalty");
  positive(cfg.t_chg, "t_chg");
  positive(cfg.t_dchg, "t_dchg");
  positive(cfg.y_mg, "y_mg");
  positive(cfg.alpha, "alpha");
  nonneg(cfg.s_pv_max, "s_pv_max");  // zero means PV is not permitted

  if (!(cfg.eta_chg > 0.0 && cfg.eta_chg <= 1.0))
    add(v, "eta_chg must lie in (0, 1], got " + num(cfg.eta_chg));
  if (!(cfg.eta_dchg > 0.0 && cfg.eta_dchg <= 1.0))
    add(v, "eta_dchg must lie in (0, 1], got " + num(cfg.eta_dchg));
  if (!(cfg.eta_pv_init > 0.0 && cfg.eta_pv_init <= 1.0))
    add(v, "eta_pv_init must lie in (0, 1], got " + num(cfg.eta_pv_init));
  if (!(cfg.delta_pv_deg >= 0.0 && cfg.delta_pv_deg < 1.0))
    add(v, "delta_pv_deg must lie in [0, 1), got " + num(cfg.delta_pv_deg));

  if (!(cfg.soc_min >= 0.0 && cfg.soc_min < 1.0))
    add(v, "soc_min must lie in [0, 1), got " + num(cfg.soc_min));
  if (!(cfg.soc_max > 0.0 && cfg.soc_max <= 1.0))
    add(v, "soc_max must lie in (0, 1], got " + num(cfg.soc_max));
  if (!(cfg.soc_min < cfg.soc_max))
    add(v, "soc_min must be strictly below soc_max, got soc_min=" +
               num(cfg.soc_min) + " soc_max=" + num(cfg.soc_max));

  if (!(cfg.m_soc >= 1.0)) add(v, "m_soc must be >= 1, got " + num(cfg.m_soc));
  if (!(cfg.s_bess_max >= 0.0))
    add(v, "s_bess_max must be >= 0, got " + num(cfg.s_bess_max));
  // Exactness of the paired power-cap linearization requires the indicator
  // big-M to dominate the largest physically possible rate on both sides.
  if (cfg.t_chg > 0.0 && cfg.m_bess < cfg.s_bess_max / cfg.t_chg - kBandTol)
    add(v, "m_bess must be >= s_bess_max / t_chg, got m_bess=" +
               num(cfg.m_bess) + " vs " + num(cfg.s_bess_max / cfg.t_chg));
  if (cfg.t_dchg > 0.0 && cfg.m_bess < cfg.s_bess_max / cfg.t_dchg - kBandTol)
    add(v, "m_bess must be >= s_bess_max / t_dchg, got m_bess=" +
               num(cfg.m_bess) + " vs " + num(cfg.s_bess_max / cfg.t_dchg));

  if (cfg.init_soc_fraction) {
    double f = *cfg.init_soc_fraction;
    if (!(f >= cfg.soc_min - kBandTol && f <= cfg.soc_max + kBandTol))
      add(v, "init_soc_fraction must lie in [soc_min, soc_max], got " + num(f));
  }

  // Taper schedule: contiguous tiling of the SOC window, beta weakly
  // decreasing, bulk band at full rate.
  if (sched.bands.empty()) {
    add(v, "taper schedule must contain at least one band");
  } else {
    if (std::fabs(sched.bands.front().tau_lower - cfg.soc_min) > kBandTol)
      add(v, "taper schedule must start at soc_min, got " +
                 num(sched.bands.front().tau_lower));
    if (std::fabs(sched.bands.back().tau_upper - cfg.soc_max) > kBandTol)
      add(v, "taper schedule must end at soc_max, got " +
                 num(sched.bands.back().tau_upper));
    if (std::fabs(sched.bands.front().beta - 1.0) > kBandTol)
      add(v, "first taper band must have beta = 1, got " +
                 num(sched.bands.front().beta));
    for (std::size_t b = 0; b < sched.bands.size(); ++b) {
      const TaperBand& band = sched.bands[b];
      if (!(band.tau_upper > band.tau_lower + kBandTol))
        add(v, "taper band " + std::to_string(b + 1) +
                   " is empty or inverted: [" + num(band.tau_lower) + ", " +
                   num(band.tau_upper) + "]");
      if (!(band.beta > 0.0 && band.beta <= 1.0))
        add(v, "taper band " + std::to_string(b + 1) +
                   " beta must lie in (0, 1], got " + num(band.beta));
      if (b > 0) {
        const TaperBand& prev = sched.bands[b - 1];
        if (std::fabs(band.tau_lower - prev.tau_upper) > kBandTol)
          add(v, "taper bands " + std::to_string(b) + " and " +
                     std::to_string(b + 1) + " are not contiguous: " +
                     num(prev.tau_upper) + " vs " + num(band.tau_lower));
        if (band.beta > prev.beta + kBandTol)
          add(v, "taper band betas must be non-increasing, band " +
                     std::to_string(b + 1) + " rises to " + num(band.beta));
      }
    }
  }

  return v;
}

std::vector<std::string> validate_profiles(const Profiles& prof) {
  std::vector<std::string> v;
  if (prof.years <= 0) add(v, "profiles need years >= 1");
  if (prof.days <= 0) add(v, "profiles need days >= 1");
  if (prof.hours <= 0) add(v, "profiles need hours >= 1");
  if (!v.empty()) return v;
  if (prof.load.size() != prof.size())
    add(v, "load series has " + std::to_string(prof.load.size()) +
               " entries, expected " + std::to_string(prof.size()));
  if (prof.pv_cf.size() != prof.size())
    add(v, "pv_cf series has " + std::to_string(prof.pv_cf.size()) +
               " entries, expected " + std::to_string(prof.size()));
  if (!v.empty()) return v;
  for (std::size_t i = 0; i < prof.load.size(); ++i) {
    if (!(prof.load[i] >= 0.0)) {
      add(v, "load must be >= 0, entry " + std::to_string(i) + " is " +
                 num(prof.load[i]));
      break;
    }
  }
  for (std::size_t i = 0; i < prof.pv_cf.size(); ++i) {
    if (!(prof.pv_cf[i] >= 0.0 && prof.pv_cf[i] <= 1.0)) {
      add(v, "pv_cf must lie in [0, 1], entry " + std::to_string(i) + " is " +
                 num(prof.pv_cf[i]));
      break;
    }
  }
  return v;
}

double pv_efficiency(const PlanningConfig& cfg, int year) {
  if (year < 1)
    throw std::domain_error("pv_efficiency: year must be >= 1, got " +
                            std::to_string(year));
  // Iterated product rather than pow() so consecutive years satisfy the
  // one-step degradation recurrence bit-exactly.
  double eta = cfg.eta_pv_init;
  for (int y = 1; y < year; ++y) eta *= (1.0 - cfg.delta_pv_deg);
  return eta;
}

}  // namespace taperplan
