#include <doctest.h>

#include <limits>
#include <random>

#include "chronosim/timebase.hpp"

using namespace chronosim;

TEST_CASE("timestamp_to_simtime") {
  CHECK(timestamp_to_simtime({0, 8000}) == SimTime(0));
  CHECK(timestamp_to_simtime({3, 8000}, PhaseFraction{1500, 1}) == SimTime(25500));
  // 10 MHz divided by 10^7 is one pulse per second.
  CHECK(timestamp_to_simtime({10'000'000, 100'000}) == SimTime(kPsPerSec));
}

TEST_CASE("timestamp_to_simtime rejects bad input") {
  CHECK_THROWS_AS(timestamp_to_simtime({1, 8000}, PhaseFraction{8000, 1}), PreconditionError);
  CHECK_THROWS_AS(timestamp_to_simtime({1, 8000}, PhaseFraction{-1, 1}), PreconditionError);
  CHECK_THROWS_AS(timestamp_to_simtime({std::numeric_limits<uint64_t>::max() / 2, 8000}), RangeError);
  CHECK_THROWS_AS(timestamp_to_simtime({1ULL << 62, 8}), RangeError);
}

TEST_CASE("quantize_event uses floor semantics") {
  CHECK(quantize_event(SimTime(25500), 8000).ticks == 3);
  CHECK(quantize_event(SimTime(8000), 8000).ticks == 1);
  CHECK(quantize_event(SimTime(7999), 8000).ticks == 0);
  CHECK(quantize_event(SimTime(7999), 8000).period_ps == 8000);
  CHECK(quantize_event(SimTime(10'500), 8000, SimTime(2500)).ticks == 1);
  CHECK_THROWS_AS(quantize_event(SimTime(-1), 8000), PreconditionError);
  CHECK_THROWS_AS(quantize_event(SimTime(10), 0), PreconditionError);
}

TEST_CASE("quantization round trip, random") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int64_t> t_dist(0, 1'000'000'000'000'000'000LL);
  std::uniform_int_distribution<int64_t> p_dist(1, 1'000'000);
  std::uniform_int_distribution<int64_t> e_dist(-1'000'000'000'000LL, 1'000'000'000'000LL);
  for (int i = 0; i < 100'000; ++i) {
    const SimTime epoch(e_dist(rng));
    const SimTime t = epoch + SimDuration(t_dist(rng));
    const int64_t period = p_dist(rng);
    const Timestamp ts = quantize_event(t, period, epoch);
    const SimTime back = epoch + timestamp_to_simtime(ts).since_epoch();
    REQUIRE(back <= t);
    REQUIRE(t - back < SimDuration(period));
  }
}

TEST_CASE("SimTime arithmetic is exact and associative") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int64_t> d(-300'000'000'000'000'000LL, 300'000'000'000'000'000LL);
  for (int i = 0; i < 100'000; ++i) {
    const SimTime t(d(rng));
    const SimDuration a(d(rng)), b(d(rng));
    REQUIRE((t + a) + b == t + (a + b));
    REQUIRE((t + a) - t == a);
    REQUIRE(((t + a) - a) == t);
    REQUIRE(a + b == b + a);
  }
  // The declared range.
  const SimTime far(1'000'000'000'000'000'000LL);
  CHECK(far - SimTime(-1'000'000'000'000'000'000LL) == SimDuration(2'000'000'000'000'000'000LL));
}

TEST_CASE("overflow is reported, never wrapped") {
  const SimTime big(std::numeric_limits<int64_t>::max() - 5);
  CHECK_THROWS_AS(big + SimDuration(10), RangeError);
  CHECK_THROWS_AS(SimDuration(std::numeric_limits<int64_t>::max() / 2) * 3, RangeError);
  CHECK_THROWS_AS(SimTime(std::numeric_limits<int64_t>::min() + 1) - SimTime(5), RangeError);
}

TEST_CASE("halving rounds toward zero") {
  CHECK(SimDuration(7).half() == SimDuration(3));
  CHECK(SimDuration(-7).half() == SimDuration(-3));
  CHECK(SimDuration(-3).half() == SimDuration(-1));
  CHECK(SimDuration(20).half() == SimDuration(10));
}

TEST_CASE("unit constructors") {
  CHECK(SimDuration::ns(1).count() == 1000);
  CHECK(SimDuration::us(1).count() == 1'000'000);
  CHECK(SimDuration::ms(1).count() == 1'000'000'000);
  CHECK(SimDuration::sec(1).count() == 1'000'000'000'000);
  CHECK(SimDuration::from_seconds(151.62e-9) == SimDuration(151'620));
  CHECK(floor_div(-1, 8) == -1);
  CHECK(floor_mod(-1, 8) == 7);
}
