#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "taperplan/cellsim.hpp"
#include "taperplan/errors.hpp"

using namespace taperplan;
using namespace taperplan::cellsim;

namespace {

PackSpec reference_pack(double r_s) {
  PackSpec p;
  p.capacity_ah = 100.0;
  p.n_series = 40;
  p.v_cell_nominal = 3.7;
  p.r_s = r_s;
  return p;
}

// Closed-form oracle for a full 0->1 charge under a step policy: each band
// [lo, hi) charged at rate c takes (hi - lo) * 3600 / c seconds at current
// c * capacity, so energies follow in closed form from constant currents.
struct PhaseOracle {
  double time_s = 0.0;
  double e_delivered_j = 0.0;
  double e_loss_j = 0.0;
};

PhaseOracle phase_oracle(const PackSpec& pack, const ChargePolicy& policy) {
  PhaseOracle o;
  const double v_oc = pack.n_series * pack.v_cell_nominal;
  for (std::size_t s = 0; s < policy.steps.size(); ++s) {
    const double lo = policy.steps[s].soc_threshold;
    const double hi =
        s + 1 < policy.steps.size() ? policy.steps[s + 1].soc_threshold : 1.0;
    const double c = policy.steps[s].c_rate;
    const double i = c * pack.capacity_ah;
    const double dur = (hi - lo) * 3600.0 / c;
    o.time_s += dur;
    o.e_delivered_j += (v_oc + i * pack.r_s) * i * dur;
    o.e_loss_j += i * i * pack.r_s * dur;
  }
  return o;
}

}  // namespace

TEST_CASE("lossless constant 1C charge takes exactly one hour") {
  ChargeTrace tr = simulate_charge(reference_pack(0.0),
                                   ChargePolicy::constant_c(1.0), 0.0, 1.0, 1.0);
  CHECK(tr.terminal_time_s == 3600.0);
  CHECK(tr.e_loss_kwh == 0.0);
  CHECK(tr.eta_chg_pct == 100.0);
  // 148 V * 100 A * 3600 s
  CHECK(tr.e_delivered_kwh == doctest::Approx(14.8).epsilon(1e-9));
  CHECK(tr.e_net_kwh == tr.e_delivered_kwh - tr.e_loss_kwh);
}

TEST_CASE("constant 1C at 1 milliohm matches the closed-form energies") {
  PackSpec pack = reference_pack(0.001);
  ChargePolicy policy = ChargePolicy::constant_c(1.0);
  ChargeTrace tr = simulate_charge(pack, policy, 0.0, 1.0, 1.0);
  PhaseOracle o = phase_oracle(pack, policy);

  CHECK(tr.terminal_time_s == doctest::Approx(o.time_s).epsilon(1e-12));
  CHECK(tr.e_delivered_kwh ==
        doctest::Approx(o.e_delivered_j / 3.6e6).epsilon(1e-9));
  // 100 A * 100 A * 0.001 ohm * 3600 s = 36 kJ = 0.01 kWh
  CHECK(tr.e_loss_kwh == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(tr.eta_chg_pct == doctest::Approx(99.9325).epsilon(1e-5));
}

TEST_CASE("default taper finishes in the four-phase step count") {
  ChargeTrace tr = simulate_charge(reference_pack(0.001),
                                   ChargePolicy::default_tapered(), 0.0, 1.0, 1.0);
  // 2880 s at 1C + 720 s at 0.5C + 900 s at 0.2C + 1800 s at 0.1C
  CHECK(std::fabs(tr.terminal_time_s - 6300.0) <= 2.0);

  PhaseOracle o = phase_oracle(reference_pack(0.001),
                               ChargePolicy::default_tapered());
  CHECK(o.time_s == doctest::Approx(6300.0));
  CHECK(tr.e_loss_kwh ==
        doctest::Approx(o.e_loss_j / 3.6e6).epsilon(1e-2));
}

TEST_CASE("tapered charging trims ohmic loss by roughly an eighth") {
  PackSpec pack = reference_pack(0.001);
  ChargeTrace c = simulate_charge(pack, ChargePolicy::constant_c(1.0), 0, 1, 1);
  ChargeTrace t = simulate_charge(pack, ChargePolicy::default_tapered(), 0, 1, 1);
  // oracle: (36000 - 31140) / 36000 = 13.5%
  const double rel = (c.e_loss_kwh - t.e_loss_kwh) / c.e_loss_kwh;
  CHECK(rel == doctest::Approx(0.135).epsilon(0.02));
  CHECK(rel > 0.10);
  CHECK(rel < 0.16);

  PolicyComparison cmp =
      compare_policies(pack, ChargePolicy::constant_c(1.0),
                       ChargePolicy::default_tapered(), 0, 1, 1);
  CHECK(cmp.delta_e_loss_kwh ==
        doctest::Approx(4860.0 / 3.6e6).epsilon(0.02));
  CHECK(cmp.eta_gain_pp > 0.0);
}

TEST_CASE("ten milliohm pack: efficiencies and the taper gain stay physical") {
  PackSpec pack = reference_pack(0.01);
  ChargeTrace c = simulate_charge(pack, ChargePolicy::constant_c(1.0), 0, 1, 1);
  ChargeTrace t = simulate_charge(pack, ChargePolicy::default_tapered(), 0, 1, 1);
  CHECK(c.eta_chg_pct == doctest::Approx(99.3289).epsilon(1e-4));
  CHECK(t.eta_chg_pct == doctest::Approx(99.4189).epsilon(1e-4));

  PolicyComparison cmp =
      compare_policies(pack, ChargePolicy::constant_c(1.0),
                       ChargePolicy::default_tapered(), 0, 1, 1);
  CHECK(cmp.eta_gain_pp > 0.04);
  CHECK(cmp.eta_gain_pp < 0.14);
}

TEST_CASE("comparing a policy against itself is a perfect null result") {
  PolicyComparison cmp =
      compare_policies(reference_pack(0.003), ChargePolicy::default_tapered(),
                       ChargePolicy::default_tapered(), 0.0, 1.0, 1.0);
  CHECK(cmp.delta_e_loss_kwh == 0.0);
  CHECK(cmp.eta_gain_pp == 0.0);
}

TEST_CASE("ohmic loss scales linearly with series resistance") {
  PackSpec pack = reference_pack(0.0);
  for (const ChargePolicy& policy :
       {ChargePolicy::constant_c(1.0), ChargePolicy::default_tapered()}) {
    pack.r_s = 0.001;
    ChargeTrace a = simulate_charge(pack, policy, 0, 1, 1);
    pack.r_s = 0.01;
    ChargeTrace b = simulate_charge(pack, policy, 0, 1, 1);
    // currents do not depend on r_s, so the ratio is exact
    CHECK(b.e_loss_kwh / a.e_loss_kwh == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(a.terminal_time_s == b.terminal_time_s);
  }
}

TEST_CASE("sweep covers the r x policy grid in order") {
  PackSpec pack = reference_pack(0.0);
  auto rows = sweep_resistance(
      pack, {0.0, 0.001, 0.01},
      {{"constant_1c", ChargePolicy::constant_c(1.0)},
       {"tapered", ChargePolicy::default_tapered()}},
      0.0, 1.0, 1.0);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].r_s == 0.0);
  CHECK(rows[0].e_loss_kwh == 0.0);
  CHECK(rows[1].eta_chg_pct == 100.0);
  CHECK(rows[3].policy == "tapered");
  CHECK(rows[3].eta_chg_pct == doctest::Approx(99.9416).epsilon(1e-4));
  CHECK(rows[5].eta_chg_pct == doctest::Approx(99.4189).epsilon(1e-4));
}

TEST_CASE("halving dt barely moves terminal time and loss") {
  PackSpec pack = reference_pack(0.01);
  ChargeTrace coarse =
      simulate_charge(pack, ChargePolicy::default_tapered(), 0, 1, 1.0);
  ChargeTrace fine =
      simulate_charge(pack, ChargePolicy::default_tapered(), 0, 1, 0.5);
  CHECK(std::fabs(fine.terminal_time_s - coarse.terminal_time_s) /
            coarse.terminal_time_s <
        0.005);
  CHECK(std::fabs(fine.e_loss_kwh - coarse.e_loss_kwh) / coarse.e_loss_kwh <
        0.005);
}

TEST_CASE("soc is monotone and the trace ends at the target") {
  ChargeTrace tr = simulate_charge(reference_pack(0.005),
                                   ChargePolicy::default_tapered(), 0.2, 0.97, 2.0);
  REQUIRE_FALSE(tr.samples.empty());
  double prev = 0.2;
  for (const TraceSample& s : tr.samples) {
    CHECK(s.soc > prev);
    prev = s.soc;
  }
  CHECK(tr.samples.back().soc >= 0.97);
  CHECK(tr.samples.back().t == tr.terminal_time_s);
}

TEST_CASE("tapered charge is slower but never less efficient") {
  PackSpec pack = reference_pack(0.004);
  ChargeTrace c = simulate_charge(pack, ChargePolicy::constant_c(1.0), 0, 1, 1);
  ChargeTrace t = simulate_charge(pack, ChargePolicy::default_tapered(), 0, 1, 1);
  CHECK(t.terminal_time_s > c.terminal_time_s);
  CHECK(t.eta_chg_pct >= c.eta_chg_pct);
}

TEST_CASE("bad arguments are rejected up front") {
  PackSpec pack = reference_pack(0.001);
  ChargePolicy ok = ChargePolicy::constant_c(1.0);
  CHECK_THROWS_AS(simulate_charge(pack, ok, 0.0, 1.0, 11.0), ConfigError);
  CHECK_THROWS_AS(simulate_charge(pack, ok, 0.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(simulate_charge(pack, ok, 0.8, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(simulate_charge(pack, ok, 0.5, 0.5, 1.0), ConfigError);

  CHECK_THROWS_AS(ChargePolicy::tapered({{0.2, 1.0}}), ConfigError);
  CHECK_THROWS_AS(ChargePolicy::tapered({{0.0, 1.0}, {0.5, 0.0}}), ConfigError);
  CHECK_THROWS_AS(ChargePolicy::tapered({{0.0, 1.0}, {0.7, 0.5}, {0.6, 0.2}}),
                  ConfigError);
  CHECK_THROWS_AS(ChargePolicy::constant_c(-1.0), ConfigError);
}

TEST_CASE("a zero-rate step reached mid-charge stalls with an error") {
  ChargePolicy broken;  // assembled by hand to dodge factory validation
  broken.steps = {{0.0, 1.0}, {0.5, 0.0}};
  CHECK_THROWS_AS(
      simulate_charge(reference_pack(0.001), broken, 0.0, 1.0, 1.0),
      SimulationError);
}

TEST_CASE("trace csv has the documented header and row count") {
  ChargeTrace tr = simulate_charge(reference_pack(0.001),
                                   ChargePolicy::constant_c(1.0), 0, 1, 1.0);
  std::ostringstream os;
  write_trace_csv(tr, os);
  std::string text = os.str();
  CHECK(text.rfind("t_s,soc,i_a,v_v,p_loss_w\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == tr.samples.size() + 1);
}
