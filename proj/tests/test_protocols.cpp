#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chronosim/protocols.hpp"
#include "chronosim/sessions.hpp"
#include "oracles.hpp"

using namespace chronosim;

namespace {

using oracle::make_round_trip;
using oracle::make_twstt;
using oracle::make_two_way;

OscillatorModel ideal_model() {
  OscillatorModel m;
  m.nominal_hz = 125e6;
  return m;
}

struct Bench {
  ClockState a{ideal_model(), {}, 1};
  ClockState b;
  Rng sw{1}, link{2};
  EventQueue queue;
  TemperatureProfile env;
  std::vector<SyncEstimate> seen;

  explicit Bench(SimDuration delta) : b(ideal_model(), delta, 2) {}

  Endpoint ep(ClockState& c) { return Endpoint{&c, TimestampMode::Software, SimDuration{}, &sw}; }
  SessionConfig cfg(int exchanges) {
    SessionConfig c;
    c.steer = false;
    c.max_exchanges = static_cast<uint64_t>(exchanges);
    return c;
  }
  void run(SyncSession& s) {
    s.set_observer([this](SimTime, const SyncEstimate& e) { seen.push_back(e); });
    s.start(SimTime(kPsPerMs));
    while (queue.step()) {
    }
  }
};

}  // namespace

TEST_CASE("two_way_estimate examples") {
  auto e = two_way_estimate({SimTime(0), SimTime(10), SimTime(20), SimTime(30)});
  CHECK(e.delay_d == SimDuration(10));
  CHECK(e.offset_delta == SimDuration(0));
  CHECK_FALSE(e.flagged);

  // Forward-generated from d = 10, delta = 5.
  const NtpStyleRecord r = make_two_way(5, 10, 10, 0, 10);
  CHECK(r.t_a2 == SimTime(5));
  CHECK(r.t_b4 == SimTime(30));
  e = two_way_estimate(r);
  CHECK(e.delay_d == SimDuration(10));
  CHECK(e.offset_delta == SimDuration(5));

  // Asymmetric truth: error (d_bwd - d_fwd) / 2.
  e = two_way_estimate(make_two_way(0, 10, 20, 0, 10));
  CHECK(e.offset_delta == SimDuration((20 - 10) / 2));
  CHECK(e.delay_d == SimDuration(15));
}

TEST_CASE("two_way_estimate flags a negative delay and rejects misordered stamps") {
  // Response apparently received before the request was answered.
  auto e = two_way_estimate({SimTime(0), SimTime(10), SimTime(100), SimTime(50)});
  CHECK(e.flagged);
  CHECK_THROWS_AS(two_way_estimate({SimTime(10), SimTime(0), SimTime(5), SimTime(0)}), PreconditionError);
  CHECK_THROWS_AS(two_way_estimate({SimTime(0), SimTime(10), SimTime(5), SimTime(30)}), PreconditionError);
}

TEST_CASE("twstt_estimate examples") {
  auto e = twstt_estimate(make_twstt(3, 10, 10));
  CHECK(e.delay_d == SimDuration(10));
  CHECK(e.offset_delta == SimDuration(3));
  e = twstt_estimate({SimDuration(7), SimDuration(13)});
  CHECK(e.delay_d == SimDuration(10));
  CHECK(e.offset_delta == SimDuration(3));
  e = twstt_estimate({SimDuration(10), SimDuration(10)});
  CHECK(e.offset_delta == SimDuration(0));
  e = twstt_estimate(make_twstt(0, 10, 12));
  CHECK(e.offset_delta == SimDuration((12 - 10) / 2));
  CHECK_THROWS_AS(twstt_estimate({SimDuration(0), SimDuration(5)}), PreconditionError);
}

TEST_CASE("round_trip_estimate examples") {
  auto e = round_trip_estimate({SimDuration(20), SimTime(0), SimTime(0)});
  CHECK(e.delay_d == SimDuration(10));
  e = round_trip_estimate({SimDuration(20), SimTime(100), SimTime(113)});
  CHECK(e.offset_delta == SimDuration(3));
  CHECK_THROWS_AS(round_trip_estimate({SimDuration(-1), SimTime(0), SimTime(0)}), PreconditionError);
  // Odd round trip halves toward zero.
  CHECK(round_trip_estimate({SimDuration(21), SimTime(0), SimTime(0)}).delay_d == SimDuration(10));
}

TEST_CASE("estimate dispatches on the variant") {
  CHECK(estimate(ExchangeRecord{make_twstt(4, 9, 9)}).offset_delta == SimDuration(4));
  CHECK(estimate(ExchangeRecord{make_two_way(-7, 9, 9, 100, 3)}).offset_delta == SimDuration(-7));
  CHECK(estimate(ExchangeRecord{make_round_trip(11, 9, 9, 50)}).offset_delta == SimDuration(11));
}

TEST_CASE("inversion is exact on symmetric channels, all variants") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int64_t> dd(1, 1'000'000'000'000LL);
  std::uniform_int_distribution<int64_t> off(-1'000'000'000'000'000LL, 1'000'000'000'000'000LL);
  for (int i = 0; i < 10'000; ++i) {
    const int64_t d = dd(rng), delta = off(rng);
    const auto a = two_way_estimate(make_two_way(delta, d, d, off(rng), dd(rng)));
    const auto b = twstt_estimate(make_twstt(delta, d + std::llabs(delta), d + std::llabs(delta)));
    const auto c = round_trip_estimate(make_round_trip(delta, d, d, off(rng)));
    REQUIRE(a.delay_d == SimDuration(d));
    REQUIRE(a.offset_delta == SimDuration(delta));
    REQUIRE(b.offset_delta == SimDuration(delta));
    REQUIRE(c.delay_d == SimDuration(d));
    REQUIRE(c.offset_delta == SimDuration(delta));
  }
}

TEST_CASE("asymmetry law: error is (d_bwd - d_fwd) / 2") {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int64_t> dd(1, 10'000'000'000LL);
  std::uniform_int_distribution<int64_t> off(-1'000'000'000LL, 1'000'000'000LL);
  for (int i = 0; i < 1000; ++i) {
    const int64_t delta = off(rng), d_fwd = dd(rng);
    int64_t d_bwd = dd(rng);
    // Odd differences lose half a picosecond to integer halving.
    if ((d_bwd - d_fwd) % 2 != 0) ++d_bwd;
    const SimDuration law((d_bwd - d_fwd) / 2);
    const int64_t t = 1'000'000'000'000LL;
    REQUIRE(two_way_estimate(make_two_way(delta, d_fwd, d_bwd, t, 1000)).offset_delta - SimDuration(delta) == law);
    REQUIRE(twstt_estimate(make_twstt(delta, d_fwd + 2'000'000'000LL, d_bwd + 2'000'000'000LL)).offset_delta -
                SimDuration(delta) == law);
    REQUIRE(round_trip_estimate(make_round_trip(delta, d_fwd, d_bwd, t)).offset_delta - SimDuration(delta) == law);
  }
  // Odd differences stay within half a picosecond.
  for (int i = 0; i < 1000; ++i) {
    const int64_t delta = off(rng), d_fwd = dd(rng), d_bwd = dd(rng);
    const SimDuration err = two_way_estimate(make_two_way(delta, d_fwd, d_bwd, 0, 10)).offset_delta - SimDuration(delta);
    REQUIRE(std::llabs(2 * err.count() - (d_bwd - d_fwd)) <= 1);
  }
}

TEST_CASE("asymmetry correction removes the bias") {
  const auto biased = two_way_estimate(make_two_way(40, 100, 160, 0, 10));
  CHECK(biased.offset_delta == SimDuration(70));
  const auto fixed = apply_asymmetry_correction(biased, SimDuration(100 - 160));
  CHECK(fixed.offset_delta == SimDuration(40));
  CHECK(fixed.asymmetry_correction_applied == SimDuration(-60));
  CHECK(fixed.delay_d == biased.delay_d);
}

TEST_CASE("the collapsed one-way inequality bounds nothing") {
  // From t_A2 - t_B1 = d - delta and t_B4 - t_A3 = d' + delta with d, d' > 0:
  // t_B1 - t_A2 < delta < t_B4 - t_A3, i.e. delta - d < delta < delta + d'.
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int64_t> dd(1, 1'000'000);
  std::uniform_int_distribution<int64_t> off(-1'000'000'000'000'000LL, 1'000'000'000'000'000LL);
  for (int i = 0; i < 100'000; ++i) {
    const int64_t d = dd(rng), dp = dd(rng);
    const int64_t delta = (i % 2 == 0) ? off(rng) : dd(rng) - 500'000;
    const NtpStyleRecord r = make_two_way(delta, d, dp, 1'000'000'000'000'000LL, 10);
    const SimDuration lower = r.t_b1 - r.t_a2;
    const SimDuration upper = r.t_b4 - r.t_a3;
    REQUIRE(lower < SimDuration(delta));
    REQUIRE(SimDuration(delta) < upper);
    // Subtracting delta leaves -d < 0 < d': the offset itself drops out.
    REQUIRE(lower - SimDuration(delta) == SimDuration(-d));
    REQUIRE(upper - SimDuration(delta) == SimDuration(dp));
  }
}

TEST_CASE("phase_measure") {
  const EdgeStream a{SimTime(0), 8000, 0.0};
  CHECK(phase_measure(a, a, 1) == PhaseFraction{0, 1});
  CHECK(phase_measure(a, {SimTime(1500), 8000, 0.0}, 1) == PhaseFraction{1500, 1});
  CHECK(phase_measure(a, {SimTime(1537), 8000, 0.0}, 10) == PhaseFraction{1530, 10});
  // Any edge of b may be given.
  CHECK(phase_measure(a, {SimTime(1537 - 5 * 8000), 8000, 0.0}, 10).ps == 1530);
  CHECK(phase_measure({SimTime(100), 8000, 0.0}, {SimTime(50), 8000, 0.0}, 1).ps == 7950);

  // Cross-check the quantization rule at many offsets.
  for (int64_t s = -20'000; s <= 20'000; s += 7) {
    for (int64_t res : {1, 10, 13, 100}) {
      const int64_t frac = ((s % 8000) + 8000) % 8000;
      const int64_t expected = (frac / res) * res;
      REQUIRE(phase_measure(a, {SimTime(s), 8000, 0.0}, res).ps == expected);
    }
  }
}

TEST_CASE("phase_measure rejects streams that are not syntonized") {
  const EdgeStream a{SimTime(0), 8000, 1e-6};
  CHECK_THROWS_AS(phase_measure(a, {SimTime(10), 8001, 1e-6}, 10), MeasurementError);
  CHECK_THROWS_AS(phase_measure(a, {SimTime(10), 8000, 1e-6 + 2e-9}, 10), MeasurementError);
  CHECK_NOTHROW(phase_measure(a, {SimTime(10), 8000, 1e-6 + 5e-10}, 10));
  CHECK_THROWS_AS(phase_measure(a, a, 0), PreconditionError);
}

TEST_CASE("event-level sessions recover the offset on noiseless symmetric paths") {
  const SimDuration delta = SimDuration::ns(777) + SimDuration(3);
  const PathModel sym{SimDuration::us(25), SimDuration::us(25)};
  {
    Bench t(delta);
    TwoWaySession s(t.queue, t.env, t.cfg(5), ProtocolKind::NTP_STYLE, t.ep(t.a), t.ep(t.b), Medium{sym, {}, &t.link},
                    nullptr);
    t.run(s);
    REQUIRE(t.seen.size() == 5);
    for (const auto& e : t.seen) {
      CHECK(e.offset_delta == delta);
      CHECK(e.delay_d == SimDuration::us(25));
    }
  }
  {
    Bench t(delta);
    TwsttSession s(t.queue, t.env, t.cfg(5), t.ep(t.a), t.ep(t.b), Medium{sym, {}, &t.link}, nullptr);
    t.run(s);
    REQUIRE(t.seen.size() == 5);
    for (const auto& e : t.seen) CHECK(e.offset_delta == delta);
  }
  {
    Bench t(delta);
    RoundTripSession s(t.queue, t.env, t.cfg(5), t.ep(t.a), t.ep(t.b), Medium{sym, {}, &t.link}, nullptr);
    t.run(s);
    REQUIRE(t.seen.size() == 5);
    for (const auto& e : t.seen) {
      CHECK(e.offset_delta == delta);
      CHECK(e.delay_d == SimDuration::us(25));
    }
  }
}

TEST_CASE("event-level TWSTT on an asymmetric satellite path") {
  // fwd 10, bwd 12, delta 0: the simulated error is (12 - 10) / 2.
  Bench t(SimDuration{});
  const PathModel p{SimDuration(10), SimDuration(12)};
  TwsttSession s(t.queue, t.env, t.cfg(3), t.ep(t.a), t.ep(t.b), Medium{p, {}, &t.link}, nullptr);
  t.run(s);
  REQUIRE(t.seen.size() == 3);
  for (const auto& e : t.seen) {
    CHECK(e.offset_delta == SimDuration(1));
    CHECK(e.delay_d == SimDuration(11));
  }
}

TEST_CASE("event-level round trip with an uncompensated reflection delay") {
  Bench t(SimDuration(3));
  const PathModel p{SimDuration(10), SimDuration(10)};
  SessionConfig cfg = t.cfg(2);
  cfg.reflection_delay = SimDuration(2);
  RoundTripSession s(t.queue, t.env, cfg, t.ep(t.a), t.ep(t.b), Medium{p, {}, &t.link}, nullptr);
  t.run(s);
  REQUIRE(t.seen.size() == 2);
  for (const auto& e : t.seen) {
    CHECK(e.delay_d == SimDuration(11));
    CHECK(e.offset_delta == SimDuration(3 - 1));
  }
}

TEST_CASE("event-level asymmetry law for the two-way session") {
  Bench t(-SimDuration::ns(50));
  const PathModel p{SimDuration::us(10), SimDuration::us(14)};
  TwoWaySession s(t.queue, t.env, t.cfg(3), ProtocolKind::NTP_STYLE, t.ep(t.a), t.ep(t.b), Medium{p, {}, &t.link},
                  nullptr);
  t.run(s);
  REQUIRE(t.seen.size() == 3);
  for (const auto& e : t.seen) CHECK(e.offset_delta == -SimDuration::ns(50) + SimDuration::us(2));
}

TEST_CASE("jitter averages out, asymmetry does not") {
  // Mean delta error over N exchanges with independent symmetric jitter on
  // each direction, repeated many times.
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int64_t> jit(0, 2'000'000);
  auto spread_of_mean = [&](int n, int64_t asym, double& mean_of_means) {
    const int reps = 400;
    double sum = 0, sum_sq = 0;
    for (int r = 0; r < reps; ++r) {
      long double acc = 0;
      for (int k = 0; k < n; ++k) {
        const int64_t d_fwd = 10'000'000 + jit(rng);
        const int64_t d_bwd = 10'000'000 + asym + jit(rng);
        acc += static_cast<long double>(two_way_estimate(make_two_way(0, d_fwd, d_bwd, 0, 1000)).offset_delta.count());
      }
      const double m = static_cast<double>(acc / n);
      sum += m;
      sum_sq += m * m;
    }
    mean_of_means = sum / reps;
    return std::sqrt(sum_sq / reps - mean_of_means * mean_of_means);
  };
  double bias_small = 0, bias_large = 0;
  const double s100 = spread_of_mean(100, 0, bias_small);
  const double s1600 = spread_of_mean(1600, 0, bias_large);
  // sqrt(1600 / 100) = 4.
  CHECK(s100 / s1600 == doctest::Approx(4.0).epsilon(0.25));

  const double b100 = (spread_of_mean(100, 500'000, bias_small), bias_small);
  const double b1600 = (spread_of_mean(1600, 500'000, bias_large), bias_large);
  CHECK(b100 == doctest::Approx(250'000).epsilon(0.05));
  CHECK(b1600 == doctest::Approx(250'000).epsilon(0.02));
}
