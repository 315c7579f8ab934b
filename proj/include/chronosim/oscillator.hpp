/**
 * @file oscillator.hpp
 * @brief Oscillators, the counters built on them, and the PI servo that
 *        disciplines a tunable oscillator to a reference.
 *
 * A clock reads physical time t as
 *
 *     local(t) = t + epoch_offset + integral of y(s) ds
 *
 * where the fractional frequency y is the sum of the static bias, linear
 * aging, a temperature term, a random-walk component and any servo steering.
 * Local minus physical time is tracked as an exact integer picosecond count;
 * each integration step rounds to the nearest picosecond and carries the
 * sub-picosecond remainder into the next step.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chronosim/random.hpp"
#include "chronosim/timebase.hpp"

namespace chronosim {

struct OscillatorModel {
  double nominal_hz = 10e6;
  double freq_bias = 0.0;             ///< fractional, e.g. 20e-6 for +20 ppm
  double aging_per_s = 0.0;           ///< fractional frequency change per second
  double temp_coeff = 0.0;            ///< fractional frequency per kelvin
  double white_phase_noise_ps = 0.0;  ///< std-dev of per-edge jitter
  double rw_freq_step = 0.0;          ///< std-dev of each random-walk frequency step
  SimDuration noise_step = SimDuration::sec(1);
  bool tunable = false;

  /// Nominal period rounded to the nearest picosecond.
  int64_t period_ps() const;

  /// Throws ConfigError on a non-positive frequency or negative noise.
  void validate() const;

  friend bool operator==(const OscillatorModel&, const OscillatorModel&) = default;
};

enum class OscillatorClass { XO, OCXO, RUBIDIUM, CESIUM_CLASS, GNSS_DISCIPLINED };

std::string_view to_string(OscillatorClass c);
std::optional<OscillatorClass> parse_oscillator_class(std::string_view name);

/// Parameter set for a stability class. The XO and OCXO biases are drawn from
/// `rng` (uniform within their class); the atomic classes are fixed.
OscillatorModel preset(OscillatorClass c, Rng& rng);

/// Piecewise-linear temperature in kelvin over physical time, held at the
/// first and last point beyond the ends. An empty profile stays at
/// `reference_k`, so the temperature term is inert.
class TemperatureProfile {
 public:
  TemperatureProfile() = default;
  explicit TemperatureProfile(std::vector<std::pair<SimTime, double>> points,
                              double reference_k = 298.15);

  double reference_k() const { return reference_k_; }
  double at(SimTime t) const;
  /// Integral of (T - T_ref) over [a, b], in kelvin * seconds.
  double deviation_integral(SimTime a, SimTime b) const;
  /// Largest |T - T_ref| on [a, b].
  double max_abs_deviation(SimTime a, SimTime b) const;
  bool empty() const { return points_.empty(); }

 private:
  std::vector<std::pair<SimTime, double>> points_;
  double reference_k_ = 298.15;
};

class ClockState {
 public:
  /// `seed` drives the random-walk frequency and the edge jitter of this
  /// clock only. `start` is the physical time of construction.
  ClockState(OscillatorModel model, SimDuration epoch_offset, uint64_t seed,
             SimTime start = SimTime::zero());

  const OscillatorModel& model() const { return model_; }
  SimDuration epoch_offset() const { return epoch_offset_; }
  SimTime last_update() const { return last_update_; }

  /// Local minus physical time at last_update, without edge jitter.
  SimDuration offset() const { return offset_; }
  /// Local reading at last_update, without edge jitter.
  SimTime local_time() const { return last_update_ + offset_; }
  /// Local reading of the edge emitted at last_update, with white phase noise.
  SimTime edge_time() const;

  /// Number of full nominal periods on the counter at last_update.
  uint64_t tick_count() const;

  /// y at last_update, including steering and (if given) temperature.
  double current_frac_freq(const TemperatureProfile* env = nullptr) const;
  /// y without steering: what the oscillator would do free-running.
  double natural_frac_freq(const TemperatureProfile* env = nullptr) const;
  double random_walk_freq() const { return rw_freq_; }
  double steering() const { return steer_; }

  /// Sets the steering term. Throws ConfigError for a non-tunable model.
  void set_steering(double frac);

  /// Integrates to physical time `to`. Throws PreconditionError if `to`
  /// precedes last_update.
  void advance(SimTime to, const TemperatureProfile& env);

  /// Physical time (>= last_update) at which the local reading reaches
  /// `local`, assuming y stays at its current value. Exact to within a
  /// picosecond for the frequency offsets handled here.
  SimTime physical_time_of(SimTime local, const TemperatureProfile* env = nullptr) const;

  friend bool operator==(const ClockState&, const ClockState&) = default;

 private:
  void integrate(SimTime a, SimTime b, const TemperatureProfile& env);

  OscillatorModel model_;
  SimDuration epoch_offset_;
  SimTime start_;
  SimTime last_update_;
  SimDuration offset_;
  double remainder_ps_ = 0.0;
  double rw_freq_ = 0.0;
  double steer_ = 0.0;
  SimTime next_noise_step_;
  uint64_t jitter_seed_ = 0;
  Rng rng_;
};

/// Value-returning form of ClockState::advance.
ClockState advance(ClockState clock, SimTime to, const TemperatureProfile& env = {});

/// Counter value at `at` with the oscillator's nominal period. `at` must be
/// the clock's last_update; a negative local reading is a PreconditionError.
Timestamp read_local(const ClockState& clock, SimTime at);

struct ServoConfig {
  double kp = 0.7;
  double ki = 0.3;
  double steer_limit = 1e-4;
  SimDuration lock_threshold = SimDuration::ns(100);
  int lock_count = 5;
};

struct ServoState {
  ServoConfig config;
  double integral_acc = 0.0;  ///< accumulated fractional-frequency term
  int consecutive_small = 0;
  bool locked = false;
};

struct ServoOutput {
  ServoState state;
  double correction = 0.0;  ///< fractional frequency to apply as steering
};

/// Checks that a servo may drive `model`; throws ConfigError otherwise.
ServoState attach_servo(const OscillatorModel& model, ServoConfig config = {});

/// One PI update. `measured_offset` is local minus reference (positive means
/// the clock is ahead), so a positive offset yields a negative correction.
/// The correction is clamped to steer_limit; the integral does not wind up
/// while the output is saturated.
ServoOutput servo_step(ServoState servo, SimDuration measured_offset, SimDuration interval);

/// Worst-case free-running offset after the reference is lost at `loss_at`:
/// |y_residual| * D + |aging| * D^2 / 2, plus |temp_coeff| * max|T - T_ref| * D
/// when a profile is given. `loss_at` must equal the clock's last_update.
SimDuration holdover(const ClockState& clock, SimTime loss_at, SimDuration duration,
                     const TemperatureProfile* env = nullptr);

/// Seconds-valued holdover bound, for horizons beyond the picosecond range.
double holdover_bound_seconds(double residual_frac_freq, double aging_per_s, double duration_s);

/// Inverse of holdover_bound_seconds: how long until the bound reaches
/// `bound_s`.
double holdover_horizon_seconds(double residual_frac_freq, double aging_per_s, double bound_s);

}  // namespace chronosim
