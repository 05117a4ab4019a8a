#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "taperplan/domain.hpp"

using namespace taperplan;

namespace {

bool mentions(const std::vector<std::string>& violations, const std::string& t) {
  for (const auto& v : violations)
    if (v.find(t) != std::string::npos) return true;
  return false;
}

PlanningConfig sane_config() {
  PlanningConfig cfg;
  cfg.soc_min = 0.1;
  cfg.soc_max = 1.0;
  cfg.s_bess_max = 30.0;
  cfg.t_chg = 4.0;
  cfg.t_dchg = 4.0;
  cfg.m_bess = 30.0 / 4.0;
  return cfg;
}

}  // namespace

TEST_CASE("well-formed config with default schedule validates clean") {
  PlanningConfig cfg = sane_config();
  TaperSchedule sched = TaperSchedule::default_schedule(cfg.soc_min, cfg.soc_max);
  CHECK(validate_config(cfg, sched).empty());
  // validation is a pure function of its arguments
  CHECK(validate_config(cfg, sched) == validate_config(cfg, sched));
}

TEST_CASE("single-band schedule validates clean") {
  PlanningConfig cfg = sane_config();
  TaperSchedule sched = TaperSchedule::single_band(cfg.soc_min, cfg.soc_max);
  REQUIRE(sched.band_count() == 1);
  CHECK(sched.bands[0].beta == 1.0);
  CHECK(validate_config(cfg, sched).empty());
}

TEST_CASE("inverted soc window is reported against soc_min") {
  PlanningConfig cfg = sane_config();
  cfg.soc_min = 0.9;
  cfg.soc_max = 0.2;
  TaperSchedule sched = TaperSchedule::single_band(cfg.soc_min, cfg.soc_max);
  auto v = validate_config(cfg, sched);
  REQUIRE_FALSE(v.empty());
  CHECK(mentions(v, "soc_min"));
}

TEST_CASE("gap between bands is reported as non-contiguous") {
  PlanningConfig cfg = sane_config();
  TaperSchedule sched;
  sched.bands = {{0.1, 0.5, 1.0}, {0.6, 1.0, 0.5}};
  auto v = validate_config(cfg, sched);
  REQUIRE_FALSE(v.empty());
  CHECK(mentions(v, "contiguous"));
}

TEST_CASE("rising beta, wrong first beta and bad coverage are all flagged") {
  PlanningConfig cfg = sane_config();

  TaperSchedule rising;
  rising.bands = {{0.1, 0.5, 1.0}, {0.5, 1.0, 1.5}};
  CHECK(mentions(validate_config(cfg, rising), "non-increasing"));

  TaperSchedule weak_first;
  weak_first.bands = {{0.1, 0.5, 0.5}, {0.5, 1.0, 0.2}};
  CHECK(mentions(validate_config(cfg, weak_first), "beta = 1"));

  TaperSchedule short_cover;
  short_cover.bands = {{0.1, 0.9, 1.0}};
  CHECK(mentions(validate_config(cfg, short_cover), "end at soc_max"));

  TaperSchedule late_start;
  late_start.bands = {{0.2, 1.0, 1.0}};
  CHECK(mentions(validate_config(cfg, late_start), "start at soc_min"));
}

TEST_CASE("indicator big-M must dominate the fastest physical rate") {
  PlanningConfig cfg = sane_config();
  cfg.m_bess = cfg.s_bess_max / cfg.t_chg - 1.0;
  TaperSchedule sched = TaperSchedule::single_band(cfg.soc_min, cfg.soc_max);
  CHECK(mentions(validate_config(cfg, sched), "m_bess"));

  cfg = sane_config();
  cfg.t_dchg = 1.0;  // discharge side now needs the larger big-M
  CHECK(mentions(validate_config(cfg, TaperSchedule::single_band(0.1, 1.0)),
                 "m_bess"));
}

TEST_CASE("m_soc below one and out-of-window init fraction are flagged") {
  PlanningConfig cfg = sane_config();
  cfg.m_soc = 0.5;
  TaperSchedule sched = TaperSchedule::single_band(cfg.soc_min, cfg.soc_max);
  CHECK(mentions(validate_config(cfg, sched), "m_soc"));

  cfg = sane_config();
  cfg.init_soc_fraction = 0.05;  // below soc_min
  CHECK(mentions(validate_config(cfg, sched), "init_soc_fraction"));

  cfg.init_soc_fraction.reset();  // free initial level is fine
  CHECK(validate_config(cfg, sched).empty());
}

TEST_CASE("default schedule clips to the soc window") {
  TaperSchedule sched = TaperSchedule::default_schedule(0.1, 1.0);
  REQUIRE(sched.band_count() == 4);
  CHECK(sched.bands[0].tau_lower == doctest::Approx(0.1));
  CHECK(sched.bands[0].tau_upper == doctest::Approx(0.80));
  CHECK(sched.bands[1].tau_upper == doctest::Approx(0.90));
  CHECK(sched.bands[2].tau_upper == doctest::Approx(0.95));
  CHECK(sched.bands[3].tau_upper == doctest::Approx(1.0));
  CHECK(sched.bands[0].beta == 1.0);
  CHECK(sched.bands[1].beta == 0.5);
  CHECK(sched.bands[2].beta == 0.2);
  CHECK(sched.bands[3].beta == 0.1);

  // A window that ends mid-taper drops the unused bands.
  TaperSchedule clipped = TaperSchedule::default_schedule(0.1, 0.9);
  REQUIRE(clipped.band_count() == 2);
  CHECK(clipped.bands.back().tau_upper == doctest::Approx(0.9));

  PlanningConfig cfg = sane_config();
  cfg.soc_max = 0.9;
  CHECK(validate_config(cfg, clipped).empty());
}

TEST_CASE("pv efficiency follows the compounded degradation recurrence") {
  PlanningConfig cfg;
  cfg.eta_pv_init = 0.2;
  cfg.delta_pv_deg = 0.01;

  CHECK(pv_efficiency(cfg, 1) == 0.2);
  // year 3 derates twice: 0.2 * 0.99 * 0.99
  CHECK(pv_efficiency(cfg, 3) == doctest::Approx(0.19602).epsilon(1e-12));

  cfg.delta_pv_deg = 0.0;
  CHECK(pv_efficiency(cfg, 10) == 0.2);

  cfg.delta_pv_deg = 0.013;
  for (int y = 1; y <= 40; ++y) {
    // one-year step is exactly one extra derating factor
    CHECK(pv_efficiency(cfg, y + 1) ==
          pv_efficiency(cfg, y) * (1.0 - cfg.delta_pv_deg));
  }

  CHECK_THROWS_AS(pv_efficiency(cfg, 0), std::domain_error);
  CHECK_THROWS_AS(pv_efficiency(cfg, -3), std::domain_error);
}

TEST_CASE("profile validation catches shape and range problems") {
  Profiles p;
  p.years = 1;
  p.days = 1;
  p.hours = 2;
  p.load = {1.0, 2.0};
  p.pv_cf = {0.0, 1.0};
  CHECK(validate_profiles(p).empty());

  Profiles short_load = p;
  short_load.load.pop_back();
  CHECK_FALSE(validate_profiles(short_load).empty());

  Profiles bad_cf = p;
  bad_cf.pv_cf[1] = 1.5;
  CHECK(mentions(validate_profiles(bad_cf), "pv_cf"));

  Profiles negative_load = p;
  negative_load.load[0] = -0.5;
  CHECK(mentions(validate_profiles(negative_load), "load"));

  Profiles empty;
  CHECK_FALSE(validate_profiles(empty).empty());
}
