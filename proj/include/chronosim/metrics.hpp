/**
 * @file metrics.hpp
 * @brief Offset-error series, summary statistics and overlapping Allan
 *        deviation.
 *
 * Statistics are computed exactly on integer picoseconds: sums use 128-bit
 * accumulators and mean / rms are rounded to the nearest picosecond (ties
 * away from zero) at the very end.
 */
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronosim/timebase.hpp"

namespace chronosim {

struct ErrorSample {
  SimTime t;
  SimDuration offset_error;
  friend bool operator==(const ErrorSample&, const ErrorSample&) = default;
};

/// Samples at a uniform cadence, times strictly increasing.
class ErrorSeries {
 public:
  explicit ErrorSeries(SimDuration cadence);

  /// PreconditionError unless `t` is exactly one cadence after the previous
  /// sample (any time is accepted for the first sample).
  void push(SimTime t, SimDuration offset_error);

  SimDuration cadence() const { return cadence_; }
  const std::vector<ErrorSample>& samples() const { return samples_; }
  size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  /// Samples from index floor(size * (1 - fraction)) to the end.
  std::span<const ErrorSample> tail(double fraction) const;

  /// CSV with header "t_ps,offset_error_ps".
  void write_csv(std::ostream& os) const;

 private:
  SimDuration cadence_;
  std::vector<ErrorSample> samples_;
};

struct AdevPoint {
  SimDuration tau;
  std::optional<double> adev;  ///< empty when `error` is set
  std::string error;
};

struct StabilityReport {
  SimDuration max_abs_error;
  SimDuration mean_error;
  SimDuration rms_error;
  size_t samples = 0;
  std::vector<AdevPoint> adev;
};

/// max |e|, mean and rms over the samples. PreconditionError if empty;
/// RangeError if the squared sum exceeds 128 bits.
StabilityReport summarize(std::span<const ErrorSample> samples);

/// Overlapping Allan deviation of phase samples x_i (ps) taken every `tau0`:
///
///   sigma_y^2(tau) = sum_{i=0}^{N-2m-1} (x_{i+2m} - 2 x_{i+m} + x_i)^2 / (2 (N - 2m) tau^2),
///
/// with tau = m * tau0. A tau that is not a positive multiple of tau0, or
/// that needs more than the N >= 3m + 1 samples available, gets an error
/// entry instead of a value.
std::vector<AdevPoint> allan_deviation(std::span<const int64_t> phase_ps, SimDuration tau0,
                                       std::span<const SimDuration> taus);

/// tau0 * 2^k for every k with 3 * 2^k + 1 <= n.
std::vector<SimDuration> octave_taus(size_t n, SimDuration tau0);

/// Offsets of a series as phase samples.
std::vector<int64_t> phase_of(std::span<const ErrorSample> samples);

}  // namespace chronosim
