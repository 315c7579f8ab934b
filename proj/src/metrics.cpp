#include "chronosim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace chronosim {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

// Nearest integer to num / den (den > 0), ties away from zero.
int64_t round_div(i128 num, i128 den) {
  const i128 q = num / den;
  const i128 r = num % den;
  i128 out = q;
  if (2 * (r < 0 ? -r : r) >= den) out += (num < 0) ? -1 : 1;
  return static_cast<int64_t>(out);
}

// Nearest integer to sqrt(s / n): the r with (2r - 1)^2 n <= 4 s < (2r + 1)^2 n.
int64_t round_sqrt_ratio(u128 s, u128 n) {
  if (s > (~u128{0}) / 4) throw RangeError("squared error sum too large");
  const u128 s4 = 4 * s;
  auto fits = [&](u128 r) {  // (2r - 1)^2 n <= 4s, checked without overflow
    if (r == 0) return true;
    const u128 k = 2 * r - 1;
    if (k != 0 && k > (~u128{0}) / k) return false;
    const u128 k2 = k * k;
    if (k2 != 0 && n > (~u128{0}) / k2) return false;
    return k2 * n <= s4;
  };
  u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(s) / static_cast<long double>(n)));
  r += 2;
  while (r > 0 && !fits(r)) --r;
  while (fits(r + 1)) ++r;
  return static_cast<int64_t>(r);
}

}  // namespace

ErrorSeries::ErrorSeries(SimDuration cadence) : cadence_(cadence) {
  if (cadence <= SimDuration{}) throw PreconditionError("series cadence must be positive");
}

void ErrorSeries::push(SimTime t, SimDuration offset_error) {
  if (!samples_.empty() && t - samples_.back().t != cadence_) {
    throw PreconditionError("samples must be spaced exactly one cadence apart");
  }
  samples_.push_back({t, offset_error});
}

std::span<const ErrorSample> ErrorSeries::tail(double fraction) const {
  fraction = std::clamp(fraction, 0.0, 1.0);
  const auto skip = static_cast<size_t>(std::floor(static_cast<double>(samples_.size()) * (1.0 - fraction)));
  return std::span<const ErrorSample>(samples_).subspan(std::min(skip, samples_.size()));
}

void ErrorSeries::write_csv(std::ostream& os) const {
  os << "t_ps,offset_error_ps\n";
  for (const auto& s : samples_) os << s.t.ps() << ',' << s.offset_error.count() << '\n';
}

StabilityReport summarize(std::span<const ErrorSample> samples) {
  if (samples.empty()) throw PreconditionError("cannot summarize an empty series");
  i128 sum = 0;
  u128 sum_sq = 0;
  int64_t max_abs = 0;
  for (const auto& s : samples) {
    const int64_t e = s.offset_error.count();
    const u128 mag = static_cast<u128>(e < 0 ? -static_cast<i128>(e) : static_cast<i128>(e));
    sum += e;
    const u128 sq = mag * mag;
    if (sum_sq > (~u128{0}) - sq) throw RangeError("squared error sum too large");
    sum_sq += sq;
    max_abs = std::max<int64_t>(max_abs, static_cast<int64_t>(mag));
  }
  StabilityReport r;
  r.samples = samples.size();
  r.max_abs_error = SimDuration(max_abs);
  r.mean_error = SimDuration(round_div(sum, static_cast<i128>(samples.size())));
  r.rms_error = SimDuration(round_sqrt_ratio(sum_sq, samples.size()));
  return r;
}

std::vector<AdevPoint> allan_deviation(std::span<const int64_t> x, SimDuration tau0,
                                       std::span<const SimDuration> taus) {
  std::vector<AdevPoint> out;
  out.reserve(taus.size());
  const size_t n = x.size();
  for (SimDuration tau : taus) {
    AdevPoint p{tau, std::nullopt, {}};
    if (tau0 <= SimDuration{} || tau <= SimDuration{} || tau.count() % tau0.count() != 0) {
      p.error = "tau is not a positive multiple of tau0";
      out.push_back(p);
      continue;
    }
    const auto m = static_cast<size_t>(tau.count() / tau0.count());
    if (n < 3 * m + 1) {
      p.error = "series too short for this tau";
      out.push_back(p);
      continue;
    }
    // Second differences of integer phase are exact; so is their square sum.
    u128 acc = 0;
    for (size_t i = 0; i + 2 * m < n; ++i) {
      const i128 d = static_cast<i128>(x[i + 2 * m]) - 2 * static_cast<i128>(x[i + m]) + x[i];
      const u128 sq = static_cast<u128>(d < 0 ? -d : d) * static_cast<u128>(d < 0 ? -d : d);
      acc += sq;
    }
    const long double tau_ps = static_cast<long double>(tau.count());
    const long double var = static_cast<long double>(acc) /
                            (2.0L * static_cast<long double>(n - 2 * m) * tau_ps * tau_ps);
    p.adev = static_cast<double>(std::sqrt(var));
    out.push_back(p);
  }
  return out;
}

std::vector<SimDuration> octave_taus(size_t n, SimDuration tau0) {
  std::vector<SimDuration> taus;
  for (size_t m = 1; 3 * m + 1 <= n; m *= 2) taus.push_back(tau0 * static_cast<int64_t>(m));
  return taus;
}

std::vector<int64_t> phase_of(std::span<const ErrorSample> samples) {
  std::vector<int64_t> x;
  x.reserve(samples.size());
  for (const auto& s : samples) x.push_back(s.offset_error.count());
  return x;
}

}  // namespace chronosim
