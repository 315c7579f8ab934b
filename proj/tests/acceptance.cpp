// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Run from the repository root (scenario paths are
// relative).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chronosim/gnss.hpp"
#include "chronosim/oscillator.hpp"
#include "chronosim/protocols.hpp"
#include "chronosim/runner.hpp"
#include "oracles.hpp"

using namespace chronosim;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json scenario_doc(const std::string& file) { return json::parse(slurp("scenarios/" + file)); }

ScenarioConfig scenario(const json& doc) {
  auto v = validate_document(doc);
  if (!v.ok()) throw std::runtime_error("invalid scenario: " + v.errors.front());
  return *v.config;
}

ScenarioConfig scenario_file(const std::string& file) { return scenario(scenario_doc(file)); }

std::string ps(SimDuration d) { return std::to_string(d.count()) + " ps"; }

// 1. Every variant recovers (d, delta) exactly on symmetric noiseless channels.
Outcome inversion() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int64_t> dd(1, 1'000'000'000'000LL);
  std::uniform_int_distribution<int64_t> off(-1'000'000'000'000'000LL, 1'000'000'000'000'000LL);
  for (int i = 0; i < 10'000 && o.ok; ++i) {
    const int64_t d = dd(rng), delta = off(rng);
    const auto a = two_way_estimate(oracle::make_two_way(delta, d, d, off(rng), dd(rng)));
    // TWSTT one-way readings stay positive when d exceeds |delta|.
    const int64_t ds = d + std::llabs(delta);
    const auto b = twstt_estimate(oracle::make_twstt(delta, ds, ds));
    const auto c = round_trip_estimate(oracle::make_round_trip(delta, d, d, off(rng)));
    o.require(a.delay_d == SimDuration(d) && a.offset_delta == SimDuration(delta), "two-way mismatch");
    o.require(b.delay_d == SimDuration(ds) && b.offset_delta == SimDuration(delta), "TWSTT mismatch");
    o.require(c.delay_d == SimDuration(d) && c.offset_delta == SimDuration(delta), "round-trip mismatch");
  }
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime " + std::to_string(secs) + " s");
  if (o.ok) o.detail = "3 x 10^4 exact recoveries in " + std::to_string(secs) + " s";
  return o;
}

// 2. On asymmetric channels the offset error is (d_bwd - d_fwd) / 2.
Outcome asymmetry_law() {
  Outcome o;
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int64_t> dd(1, 10'000'000'000LL);
  std::uniform_int_distribution<int64_t> off(-1'000'000'000LL, 1'000'000'000LL);
  for (int i = 0; i < 1000 && o.ok; ++i) {
    const int64_t delta = off(rng), d_fwd = dd(rng);
    int64_t d_bwd = dd(rng);
    // Even differences keep the half-asymmetry an integer picosecond.
    if ((d_bwd - d_fwd) % 2 != 0) ++d_bwd;
    const SimDuration law((d_bwd - d_fwd) / 2);
    const SimDuration truth(delta);
    const int64_t t = 1'000'000'000'000LL, sat = 2'000'000'000LL;
    o.require(two_way_estimate(oracle::make_two_way(delta, d_fwd, d_bwd, t, 1000)).offset_delta - truth == law,
              "two-way");
    o.require(twstt_estimate(oracle::make_twstt(delta, d_fwd + sat, d_bwd + sat)).offset_delta - truth == law,
              "TWSTT");
    o.require(round_trip_estimate(oracle::make_round_trip(delta, d_fwd, d_bwd, t)).offset_delta - truth == law,
              "round trip");
  }
  if (o.ok) o.detail = "10^3 channels, all three variants exact";
  return o;
}

// 3. GNSS solver accuracy, noiseless and with 10 ns pseudorange noise.
Outcome gnss() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1003);
  int64_t worst_ps = 0;
  double worst_m = 0;
  for (int i = 0; i < 1000 && o.ok; ++i) {
    const auto truth = oracle::random_truth(rng);
    const auto sats = synthetic_constellation(6, SimTime(i * 30 * kPsPerSec), truth.position);
    const auto sol = gnss_solve(oracle::observations(truth, sats));
    worst_ps = std::max<int64_t>(worst_ps, std::llabs(sol.clock_offset.count() - truth.offset_ps));
    worst_m = std::max(worst_m, oracle::distance(sol.position, truth.position));
  }
  o.require(worst_ps <= 10, "noiseless offset error " + std::to_string(worst_ps) + " ps");
  o.require(worst_m < 1e-3, "noiseless position error " + std::to_string(worst_m) + " m");
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto truth = oracle::random_truth(rng);
    const auto sats = synthetic_constellation(6, SimTime(i * 60 * kPsPerSec), truth.position);
    const auto sol = gnss_solve(oracle::observations(truth, sats, 0, &rng, 10'000.0));
    if (std::llabs(sol.clock_offset.count() - truth.offset_ps) < 100'000) ++inside;
  }
  o.require(inside >= 950, std::to_string(inside) + "/1000 noisy solves inside 100 ns");
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  if (o.ok) {
    o.detail = "noiseless worst " + std::to_string(worst_ps) + " ps / " + std::to_string(worst_m * 1e3) +
               " mm; noisy " + std::to_string(inside) + "/1000 inside 100 ns; " + std::to_string(secs) + " s";
  }
  return o;
}

// 4. An uncompensated cable biases the offset by its delay; compensation removes it.
Outcome cable() {
  Outcome o;
  std::mt19937_64 rng(1004);
  int64_t worst_truth = 0;
  for (double len = 1.0; len <= 100.0 && o.ok; len += 0.75) {
    const CableModel c{len, 0.66};
    const int64_t cable_ps = cable_delay(c).count();
    const auto truth = oracle::random_truth(rng);
    const auto sats = synthetic_constellation(6, SimTime(0), truth.position);
    // The cable-free solve of the same geometry isolates the cable term from
    // the solver's own picosecond floor.
    const auto clean = gnss_solve(oracle::observations(truth, sats));
    const auto raw = gnss_solve(oracle::observations(truth, sats, cable_ps));
    const int64_t bias = raw.clock_offset.count() - clean.clock_offset.count();
    o.require(std::llabs(bias - cable_ps) <= 1, "bias off by " + std::to_string(bias - cable_ps) + " ps");
    const int64_t left = compensate_cable(raw, c).clock_offset.count() - clean.clock_offset.count();
    o.require(std::llabs(left) <= 1, "residual " + std::to_string(left) + " ps after compensation");
    worst_truth = std::max<int64_t>(worst_truth, std::llabs(compensate_cable(raw, c).clock_offset.count() - truth.offset_ps));
  }
  o.require(worst_truth <= 10, "compensated offset " + std::to_string(worst_truth) + " ps from truth");
  if (o.ok) {
    o.detail = "1-100 m cables: bias = cable delay within 1 ps, removed by compensation (worst " +
               std::to_string(worst_truth) + " ps from truth)";
  }
  return o;
}

// 5. White Rabbit over a calibrated asymmetric 10 km fiber, plus an uncalibrated control.
Outcome white_rabbit() {
  Outcome o;
  const auto t0 = Clock::now();
  json doc = scenario_doc("white_rabbit_10km.json");
  const ScenarioConfig cfg = scenario(doc);
  o.require(cfg.protocol.session.phase_resolution_ps == 10, "phase resolution is not 10 ps");
  o.require(cfg.protocol.duration == SimDuration::sec(60), "duration is not 60 s");
  const RunReport cal = run_scenario(cfg);
  const SimDuration worst = cal.steady_state_max_abs();
  o.require(worst < SimDuration::ns(1), "calibrated max |error| " + ps(worst));

  doc["links"][0]["calibrate"] = false;
  const RunReport raw = run_scenario(scenario(doc));
  const NodeReport* b = raw.find("B");
  o.require(b != nullptr && b->link.has_value(), "no slave report");
  if (!o.ok) return o;
  const SimDuration half = fiber_asymmetry(*b->link).half();
  const SimDuration mean = b->steady_state.mean_error;
  o.require(std::llabs((mean - half).count()) <= std::llabs(half.count()) / 10,
            "control bias " + ps(mean) + " vs asymmetry/2 " + ps(half));
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
  if (o.ok) {
    o.detail = "calibrated max |error| " + ps(worst) + "; uncalibrated mean " + ps(mean) + " vs asymmetry/2 " +
               ps(half) + "; " + std::to_string(secs) + " s";
  }
  return o;
}

// 6. WHITE_RABBIT < PTP_HW (sub-microsecond) < NTP_STYLE software (millisecond class).
Outcome ladder() {
  Outcome o;
  const auto rows =
      compare_protocols({scenario_file("ladder_ntp.json"), scenario_file("ladder_ptp.json"), scenario_file("ladder_wr.json")});
  o.require(rows.size() == 3, "expected three rows");
  if (!o.ok) return o;
  o.require(rows[0].index == 2 && rows[1].index == 1 && rows[2].index == 0, "ordering is not WR < PTP < NTP");
  o.require(rows[1].steady_state_max_abs < SimDuration::us(1), "PTP_HW " + ps(rows[1].steady_state_max_abs));
  o.require(rows[2].steady_state_max_abs >= SimDuration::us(100) && rows[2].steady_state_max_abs < SimDuration::ms(10),
            "NTP_STYLE " + ps(rows[2].steady_state_max_abs));
  std::string d;
  for (const auto& r : rows) d += r.label + " " + ps(r.steady_state_max_abs) + "; ";
  if (o.ok) o.detail = d.substr(0, d.size() - 2);
  else o.detail += " (" + d.substr(0, d.size() - 2) + ")";
  return o;
}

// 7. Drift arithmetic and the holdover horizon.
Outcome drift() {
  Outcome o;
  OscillatorModel xo;
  xo.nominal_hz = 125e6;
  xo.freq_bias = 20e-6;
  ClockState c(xo, {}, 1);
  c.advance(SimTime(kPsPerSec), TemperatureProfile{});
  o.require(c.offset() == SimDuration::us(20), "20 ppm over 1 s gave " + ps(c.offset()));
  const double years = holdover_horizon_seconds(1e-11, 0.0, 1e-3) / (365.0 * 86'400.0);
  o.require(std::abs(years - 3.17) / 3.17 < 0.005, "holdover horizon " + std::to_string(years) + " years");
  o.require(std::abs(holdover_bound_seconds(1e-11, 0.0, 1e8) - 1e-3) < 1e-12, "bound at 10^8 s");
  // 10^8 s is past the picosecond range; the simulated clock is checked at 10^6 s.
  OscillatorModel rb;
  rb.nominal_hz = 10e6;
  rb.freq_bias = 1e-11;
  const ClockState r(rb, {}, 1);
  o.require(holdover(r, SimTime(0), SimDuration::sec(1'000'000)) == SimDuration::us(10), "holdover at 10^6 s");
  if (o.ok) o.detail = "20 ppm -> " + ps(c.offset()) + " in 1 s; 1 ms holdover at " + std::to_string(years) + " years";
  return o;
}

// 8. The one-way inequality bounds nothing; free-running clocks diverge.
Outcome huygens() {
  Outcome o;
  std::mt19937_64 rng(1008);
  std::uniform_int_distribution<int64_t> dd(1, 1'000'000);
  std::uniform_int_distribution<int64_t> huge(-1'000'000'000'000'000LL, 1'000'000'000'000'000LL);
  int far = 0;
  for (int i = 0; i < 100'000 && o.ok; ++i) {
    const int64_t d = dd(rng), dp = dd(rng);
    const int64_t delta = i % 2 == 0 ? huge(rng) : dd(rng) - 500'000;
    if (std::llabs(delta) > 1000 * (d + dp)) ++far;
    const auto r = oracle::make_two_way(delta, d, dp, 1'000'000'000'000'000LL, 10);
    // t_B1 - t_A2 < delta < t_B4 - t_A3 reduces to -d < 0 < d'.
    const SimDuration lo = r.t_b1 - r.t_a2 - SimDuration(delta);
    const SimDuration hi = r.t_b4 - r.t_a3 - SimDuration(delta);
    o.require(lo == SimDuration(-d) && hi == SimDuration(dp), "collapsed bounds depend on delta");
    o.require(lo < SimDuration{} && SimDuration{} < hi, "inequality violated");
  }
  o.require(far > 10'000, "too few samples with |delta| >> d + d'");

  // Noiseless pair: gap equals |(alpha - beta) t + (a - b)| and keeps growing.
  const double alpha = 3e-6, beta = -2e-6;
  OscillatorModel ma, mb;
  ma.nominal_hz = mb.nominal_hz = 10e6;
  ma.freq_bias = alpha;
  mb.freq_bias = beta;
  ClockState ca(ma, -SimDuration::ms(1), 1), cb(mb, SimDuration::ms(1), 2);
  SimDuration prev;
  for (int64_t s = 400; s <= 1'000'000 && o.ok; s *= 2) {
    const SimTime t(s * kPsPerSec);
    ca.advance(t, TemperatureProfile{});
    cb.advance(t, TemperatureProfile{});
    const SimDuration gap = (ca.offset() - cb.offset()).abs();
    const int64_t drift = std::llround((alpha - beta) * static_cast<double>(s) * 1e12);
    const int64_t expect = std::llabs(drift - 2 * kPsPerMs);
    o.require(std::llabs(gap.count() - expect) <= 1, "gap at " + std::to_string(s) + " s is " + ps(gap));
    o.require(s == 400 || gap > prev, "gap stopped growing");
    prev = gap;
  }

  // Noisy XO presets: the gap grows with the horizon.
  Rng pick(8);
  ClockState xa(preset(OscillatorClass::XO, pick), {}, 3), xb(preset(OscillatorClass::XO, pick), {}, 4);
  SimDuration last;
  for (int64_t s : {10, 100, 1000, 10'000}) {
    const SimTime t(s * kPsPerSec);
    xa.advance(t, TemperatureProfile{});
    xb.advance(t, TemperatureProfile{});
    const SimDuration gap = (xa.offset() - xb.offset()).abs();
    o.require(gap > last * 5, "XO gap at " + std::to_string(s) + " s is " + ps(gap));
    last = gap;
  }
  if (o.ok) {
    o.detail = "10^5 samples (" + std::to_string(far) + " with |delta| > 1000 (d + d')); gap " + ps(prev) +
               " at 10^6 s";
  }
  return o;
}

// 9. Allan deviation against the definition, the white-FM slope and ramp invariance.
Outcome allan() {
  Outcome o;
  std::mt19937_64 rng(1009);
  for (int trial = 0; trial < 50 && o.ok; ++trial) {
    const size_t n = 10 + rng() % 3000;
    std::uniform_int_distribution<int64_t> d(-1'000'000'000'000LL, 1'000'000'000'000LL);
    std::vector<int64_t> x(n);
    for (auto& v : x) v = d(rng);
    const SimDuration tau0 = SimDuration::ms(1 + static_cast<int64_t>(rng() % 1000));
    const auto taus = octave_taus(n, tau0);
    std::vector<int64_t> taus_ps;
    for (auto t : taus) taus_ps.push_back(t.count());
    const auto got = allan_deviation(x, tau0, taus);
    const auto want = oracle::brute_force_adev(x, tau0.count(), taus_ps);
    for (size_t i = 0; i < taus.size(); ++i) o.require(got[i].adev && want[i] && *got[i].adev == *want[i], "oracle");
  }

  std::normal_distribution<double> g(0.0, 1000.0);
  std::vector<int64_t> x(200'000);
  double acc = 0;
  for (auto& v : x) {
    acc += g(rng);
    v = std::llround(acc);
  }
  const SimDuration tau0 = SimDuration::sec(1);
  std::vector<SimDuration> taus;
  for (int64_t m : {1, 2, 4, 8, 16}) taus.push_back(tau0 * m);
  taus.push_back(tau0 * 10);
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : allan_deviation(x, tau0, taus)) pts.emplace_back(p.tau.seconds(), *p.adev);
  const double slope = oracle::log_slope(pts);
  o.require(std::abs(slope + 0.5) <= 0.05, "slope " + std::to_string(slope));

  std::vector<int64_t> ramped = x;
  for (size_t i = 0; i < x.size(); ++i) ramped[i] += 7'654'321 - 4321 * static_cast<int64_t>(i);
  const auto a = allan_deviation(x, tau0, taus), b = allan_deviation(ramped, tau0, taus);
  for (size_t i = 0; i < taus.size(); ++i) o.require(*a[i].adev == *b[i].adev, "ramp changed adev");
  if (o.ok) o.detail = "oracle exact on 50 series; white-FM slope " + std::to_string(slope) + "; ramp invariant";
  return o;
}

// 10. Equal seeds give byte-identical CSVs for every scenario.
Outcome reproducibility() {
  Outcome o;
  const auto base = std::filesystem::temp_directory_path() / "chronosim_acceptance";
  std::filesystem::remove_all(base);
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator("scenarios")) {
    if (entry.path().extension() != ".json") continue;
    const auto cfg = scenario_file(entry.path().filename().string());
    const auto stem = entry.path().stem();
    run_scenario(cfg, base / stem / "a");
    run_scenario(cfg, base / stem / "b");
    for (const auto& f : std::filesystem::directory_iterator(base / stem / "a")) {
      if (f.path().extension() != ".csv") continue;
      const auto other = base / stem / "b" / f.path().filename();
      o.require(std::filesystem::exists(other) && slurp(f.path()) == slurp(other),
                stem.string() + "/" + f.path().filename().string() + " differs");
      ++files;
    }
  }
  std::filesystem::remove_all(base);
  o.require(files > 0, "no CSV files produced");
  if (o.ok) o.detail = std::to_string(files) + " CSV files identical across paired runs";
  return o;
}

}  // namespace

int main() {
  init_logging_from_env();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"formula inversion", inversion},   {"asymmetry law", asymmetry_law},
      {"GNSS solver", gnss},              {"cable compensation", cable},
      {"White Rabbit 10 km", white_rabbit}, {"precision ladder", ladder},
      {"drift arithmetic", drift},        {"Huygens properties", huygens},
      {"Allan deviation", allan},         {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.ok) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
