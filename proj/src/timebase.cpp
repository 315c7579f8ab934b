#include "chronosim/timebase.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace chronosim {

namespace detail {

int64_t checked_add(int64_t a, int64_t b) {
  int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw RangeError("picosecond addition overflows int64");
  }
  return r;
}

int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw RangeError("picosecond multiplication overflows int64");
  }
  return r;
}

}  // namespace detail

SimDuration SimDuration::from_seconds(double s) {
  const double ps = std::round(s * 1e12);
  if (!std::isfinite(ps) || std::abs(ps) >= 9.2e18) {
    throw RangeError("duration of " + std::to_string(s) + " s is outside the picosecond range");
  }
  return SimDuration(static_cast<int64_t>(ps));
}

std::ostream& operator<<(std::ostream& os, SimDuration d) { return os << d.count() << "ps"; }
std::ostream& operator<<(std::ostream& os, SimTime t) { return os << "@" << t.ps() << "ps"; }

SimTime timestamp_to_simtime(const Timestamp& ts, const std::optional<PhaseFraction>& phase) {
  if (ts.period_ps <= 0) throw PreconditionError("timestamp period must be positive");
  if (ts.ticks > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
    throw RangeError("tick count exceeds the picosecond range");
  }
  int64_t ps = detail::checked_mul(static_cast<int64_t>(ts.ticks), ts.period_ps);
  if (phase) {
    if (phase->ps < 0 || phase->ps >= ts.period_ps) {
      throw PreconditionError("phase fraction must lie in [0, period)");
    }
    ps = detail::checked_add(ps, phase->ps);
  }
  return SimTime(ps);
}

Timestamp quantize_event(SimTime t, int64_t period_ps, SimTime epoch) {
  if (period_ps <= 0) throw PreconditionError("period must be positive");
  if (t < epoch) throw PreconditionError("event precedes the clock epoch");
  const int64_t elapsed = (t - epoch).count();
  return Timestamp{static_cast<uint64_t>(elapsed / period_ps), period_ps};
}

}  // namespace chronosim
