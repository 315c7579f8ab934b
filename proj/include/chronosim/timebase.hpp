/**
 * @file timebase.hpp
 * @brief Physical time axis of the simulator, in exact integer picoseconds.
 *
 * SimTime is a point on the physical axis, SimDuration the difference of two
 * points. Both wrap a signed 64-bit picosecond count (about ±106 days), and
 * all arithmetic on them is exact. Timestamp and PhaseFraction model what a
 * counter driven by an oscillator can actually observe: the integer number of
 * rising edges, and separately the sub-period remainder measured by a time
 * interval counter.
 */
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace chronosim {

/// Raised when a value cannot be represented on the picosecond axis.
class RangeError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Raised when a caller violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for invalid model or scenario parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int64_t kPsPerNs = 1'000;
inline constexpr int64_t kPsPerUs = 1'000'000;
inline constexpr int64_t kPsPerMs = 1'000'000'000;
inline constexpr int64_t kPsPerSec = 1'000'000'000'000;

namespace detail {
int64_t checked_add(int64_t a, int64_t b);
int64_t checked_mul(int64_t a, int64_t b);
}  // namespace detail

/// Signed picosecond duration.
class SimDuration {
 public:
  constexpr SimDuration() = default;
  constexpr explicit SimDuration(int64_t ps) : ps_(ps) {}

  static constexpr SimDuration ps(int64_t v) { return SimDuration(v); }
  static constexpr SimDuration ns(int64_t v) { return SimDuration(v * kPsPerNs); }
  static constexpr SimDuration us(int64_t v) { return SimDuration(v * kPsPerUs); }
  static constexpr SimDuration ms(int64_t v) { return SimDuration(v * kPsPerMs); }
  static constexpr SimDuration sec(int64_t v) { return SimDuration(v * kPsPerSec); }

  /// Nearest picosecond to a duration given in seconds.
  static SimDuration from_seconds(double s);

  constexpr int64_t count() const { return ps_; }
  constexpr double seconds() const { return static_cast<double>(ps_) * 1e-12; }

  /// Halves toward zero: (-3 ps).half() == -1 ps.
  constexpr SimDuration half() const { return SimDuration(ps_ / 2); }
  constexpr SimDuration abs() const { return SimDuration(ps_ < 0 ? -ps_ : ps_); }

  constexpr SimDuration operator-() const { return SimDuration(-ps_); }
  SimDuration& operator+=(SimDuration o) {
    ps_ = detail::checked_add(ps_, o.ps_);
    return *this;
  }
  SimDuration& operator-=(SimDuration o) { return *this += -o; }

  friend SimDuration operator+(SimDuration a, SimDuration b) { return a += b; }
  friend SimDuration operator-(SimDuration a, SimDuration b) { return a -= b; }
  friend SimDuration operator*(SimDuration a, int64_t k) {
    return SimDuration(detail::checked_mul(a.ps_, k));
  }
  friend SimDuration operator*(int64_t k, SimDuration a) { return a * k; }

  constexpr auto operator<=>(const SimDuration&) const = default;

 private:
  int64_t ps_ = 0;
};

/// Point on the physical time axis, picoseconds since the simulation epoch.
class SimTime {
 public:
  constexpr SimTime() = default;
  constexpr explicit SimTime(int64_t ps) : ps_(ps) {}

  static constexpr SimTime from_ps(int64_t v) { return SimTime(v); }
  static constexpr SimTime zero() { return SimTime(0); }

  constexpr int64_t ps() const { return ps_; }
  constexpr double seconds() const { return static_cast<double>(ps_) * 1e-12; }
  constexpr SimDuration since_epoch() const { return SimDuration(ps_); }

  SimTime& operator+=(SimDuration d) {
    ps_ = detail::checked_add(ps_, d.count());
    return *this;
  }
  SimTime& operator-=(SimDuration d) { return *this += -d; }

  friend SimTime operator+(SimTime t, SimDuration d) { return t += d; }
  friend SimTime operator+(SimDuration d, SimTime t) { return t += d; }
  friend SimTime operator-(SimTime t, SimDuration d) { return t -= d; }
  friend SimDuration operator-(SimTime a, SimTime b) {
    return SimDuration(detail::checked_add(a.ps_, -b.ps_));
  }

  constexpr auto operator<=>(const SimTime&) const = default;

 private:
  int64_t ps_ = 0;
};

std::ostream& operator<<(std::ostream& os, SimDuration d);
std::ostream& operator<<(std::ostream& os, SimTime t);

/// Integer count of rising edges. Resolution is exactly one period.
struct Timestamp {
  uint64_t ticks = 0;
  int64_t period_ps = 0;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Sub-period remainder of a timestamp, as measured by a time interval
/// counter with a finite resolution. Invariant: 0 <= ps < period, and ps is a
/// multiple of resolution_ps.
struct PhaseFraction {
  int64_t ps = 0;
  int64_t resolution_ps = 1;

  friend bool operator==(const PhaseFraction&, const PhaseFraction&) = default;
};

/// Timestamp value plus optional phase, relative to the clock's epoch.
/// Throws RangeError if ticks * period does not fit, PreconditionError if the
/// phase is not inside one period.
SimTime timestamp_to_simtime(const Timestamp& ts,
                             const std::optional<PhaseFraction>& phase = std::nullopt);

/// Index of the most recent rising edge at or before `t` (floor semantics;
/// an event exactly on an edge belongs to that edge).
Timestamp quantize_event(SimTime t, int64_t period_ps, SimTime epoch = SimTime::zero());

/// Floor division for signed values; the quotient rounds toward -infinity.
constexpr int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Non-negative remainder matching floor_div.
constexpr int64_t floor_mod(int64_t a, int64_t b) { return a - floor_div(a, b) * b; }

}  // namespace chronosim
