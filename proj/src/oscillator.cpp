#include "chronosim/oscillator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace chronosim {

int64_t OscillatorModel::period_ps() const {
  return static_cast<int64_t>(std::llround(1e12 / nominal_hz));
}

void OscillatorModel::validate() const {
  if (!(nominal_hz > 0.0) || !std::isfinite(nominal_hz)) {
    throw ConfigError("oscillator nominal_hz must be positive");
  }
  if (nominal_hz > 1e12) throw ConfigError("oscillator nominal_hz exceeds 1 THz");
  if (white_phase_noise_ps < 0.0 || rw_freq_step < 0.0) {
    throw ConfigError("oscillator noise parameters must be non-negative");
  }
  if (!std::isfinite(freq_bias) || std::abs(freq_bias) >= 0.5) {
    throw ConfigError("oscillator freq_bias must be finite and well below 1");
  }
  if (noise_step <= SimDuration{}) throw ConfigError("oscillator noise_step must be positive");
}

namespace {
constexpr std::array<std::pair<OscillatorClass, std::string_view>, 5> kClassNames{{
    {OscillatorClass::XO, "XO"},
    {OscillatorClass::OCXO, "OCXO"},
    {OscillatorClass::RUBIDIUM, "RUBIDIUM"},
    {OscillatorClass::CESIUM_CLASS, "CESIUM_CLASS"},
    {OscillatorClass::GNSS_DISCIPLINED, "GNSS_DISCIPLINED"},
}};

// Random-walk step that puts sigma_y(1000 s) at `adev` for 1 s steps:
// sigma_y(tau) = q * sqrt(tau / 3).
constexpr double rw_for_adev_at_1000s(double adev) { return adev * 0.05477225575051661; }
}  // namespace

std::string_view to_string(OscillatorClass c) {
  for (const auto& [k, name] : kClassNames) {
    if (k == c) return name;
  }
  return "?";
}

std::optional<OscillatorClass> parse_oscillator_class(std::string_view name) {
  for (const auto& [k, n] : kClassNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

OscillatorModel preset(OscillatorClass c, Rng& rng) {
  OscillatorModel m;
  switch (c) {
    case OscillatorClass::XO:
      m.nominal_hz = 125e6;
      m.freq_bias = std::uniform_real_distribution<double>(-50e-6, 50e-6)(rng);
      m.temp_coeff = 1e-7;
      m.white_phase_noise_ps = 10.0;
      m.rw_freq_step = 1e-10;
      m.tunable = false;  // no tuning port
      break;
    case OscillatorClass::OCXO:
      m.nominal_hz = 10e6;
      m.freq_bias = std::uniform_real_distribution<double>(-1e-8, 1e-8)(rng);
      m.temp_coeff = 1e-10;
      m.white_phase_noise_ps = 5.0;
      m.rw_freq_step = 1e-12;
      m.tunable = true;
      break;
    case OscillatorClass::RUBIDIUM:
      m.nominal_hz = 10e6;
      m.freq_bias = 1e-11;
      m.white_phase_noise_ps = 1.0;
      m.rw_freq_step = rw_for_adev_at_1000s(1e-11);
      m.tunable = true;
      break;
    case OscillatorClass::CESIUM_CLASS:
      m.nominal_hz = 10e6;
      m.freq_bias = 1e-13;
      m.white_phase_noise_ps = 1.0;
      m.rw_freq_step = rw_for_adev_at_1000s(1e-13);
      m.tunable = true;
      break;
    case OscillatorClass::GNSS_DISCIPLINED:
      m.nominal_hz = 10e6;
      m.freq_bias = 1e-12;
      m.white_phase_noise_ps = 2.0;
      m.rw_freq_step = rw_for_adev_at_1000s(1e-12);
      m.tunable = true;
      break;
  }
  return m;
}

// --- TemperatureProfile ------------------------------------------------------

TemperatureProfile::TemperatureProfile(std::vector<std::pair<SimTime, double>> points,
                                       double reference_k)
    : points_(std::move(points)), reference_k_(reference_k) {
  for (size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].first <= points_[i - 1].first) {
      throw ConfigError("temperature profile times must be strictly increasing");
    }
  }
}

double TemperatureProfile::at(SimTime t) const {
  if (points_.empty()) return reference_k_;
  if (t <= points_.front().first) return points_.front().second;
  if (t >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                             [](SimTime v, const auto& p) { return v < p.first; });
  auto lo = hi - 1;
  const double f = static_cast<double>((t - lo->first).count()) /
                   static_cast<double>((hi->first - lo->first).count());
  return lo->second + f * (hi->second - lo->second);
}

double TemperatureProfile::deviation_integral(SimTime a, SimTime b) const {
  if (points_.empty() || b <= a) return 0.0;
  // Breakpoints inside (a, b) split the integral into linear pieces.
  std::vector<SimTime> cuts{a};
  for (const auto& p : points_) {
    if (p.first > a && p.first < b) cuts.push_back(p.first);
  }
  cuts.push_back(b);
  double sum = 0.0;
  for (size_t i = 1; i < cuts.size(); ++i) {
    const double dt = (cuts[i] - cuts[i - 1]).seconds();
    sum += 0.5 * (at(cuts[i - 1]) + at(cuts[i]) - 2.0 * reference_k_) * dt;
  }
  return sum;
}

double TemperatureProfile::max_abs_deviation(SimTime a, SimTime b) const {
  if (points_.empty()) return 0.0;
  double m = std::max(std::abs(at(a) - reference_k_), std::abs(at(b) - reference_k_));
  for (const auto& p : points_) {
    if (p.first > a && p.first < b) m = std::max(m, std::abs(p.second - reference_k_));
  }
  return m;
}

// --- ClockState --------------------------------------------------------------

ClockState::ClockState(OscillatorModel model, SimDuration epoch_offset, uint64_t seed,
                       SimTime start)
    : model_(model),
      epoch_offset_(epoch_offset),
      start_(start),
      last_update_(start),
      offset_(epoch_offset),
      next_noise_step_(start + model.noise_step),
      jitter_seed_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)),
      rng_(seed) {
  model_.validate();
}

SimTime ClockState::edge_time() const {
  if (model_.white_phase_noise_ps == 0.0) return local_time();
  const double j = model_.white_phase_noise_ps *
                   hashed_normal(jitter_seed_, static_cast<uint64_t>(last_update_.ps()));
  return local_time() + SimDuration(std::llround(j));
}

uint64_t ClockState::tick_count() const {
  const int64_t local = local_time().ps();
  if (local < 0) throw PreconditionError("local reading is before the counter epoch");
  return static_cast<uint64_t>(local / model_.period_ps());
}

double ClockState::natural_frac_freq(const TemperatureProfile* env) const {
  double y = model_.freq_bias + rw_freq_ + model_.aging_per_s * (last_update_ - start_).seconds();
  if (env != nullptr && !env->empty()) {
    y += model_.temp_coeff * (env->at(last_update_) - env->reference_k());
  }
  return y;
}

double ClockState::current_frac_freq(const TemperatureProfile* env) const {
  return natural_frac_freq(env) + steer_;
}

void ClockState::set_steering(double frac) {
  if (!model_.tunable) throw ConfigError("oscillator is not tunable; it cannot be steered");
  steer_ = frac;
}

void ClockState::integrate(SimTime a, SimTime b, const TemperatureProfile& env) {
  const int64_t dt_ps = (b - a).count();
  if (dt_ps == 0) return;
  const double dt = static_cast<double>(dt_ps);
  double dev = dt * (model_.freq_bias + rw_freq_ + steer_);
  if (model_.aging_per_s != 0.0) {
    const double age_a = (a - start_).seconds();
    const double age_b = (b - start_).seconds();
    dev += model_.aging_per_s * dt * 0.5 * (age_a + age_b);
  }
  if (model_.temp_coeff != 0.0 && !env.empty()) {
    dev += model_.temp_coeff * env.deviation_integral(a, b) * 1e12;
  }
  const double total = dev + remainder_ps_;
  const double whole = std::nearbyint(total);
  if (std::abs(whole) >= 9.2e18) throw RangeError("clock offset leaves the picosecond range");
  offset_ += SimDuration(static_cast<int64_t>(whole));
  remainder_ps_ = total - whole;
}

void ClockState::advance(SimTime to, const TemperatureProfile& env) {
  if (to < last_update_) throw PreconditionError("clock cannot advance backwards");
  if (model_.rw_freq_step == 0.0) {
    integrate(last_update_, to, env);
    last_update_ = to;
    return;
  }
  // Random-walk steps land on a fixed grid so the trajectory does not depend
  // on how the caller slices the interval.
  while (last_update_ < to) {
    const SimTime seg_end = std::min(to, next_noise_step_);
    integrate(last_update_, seg_end, env);
    last_update_ = seg_end;
    if (seg_end == next_noise_step_) {
      rw_freq_ += model_.rw_freq_step * std::normal_distribution<double>()(rng_);
      next_noise_step_ += model_.noise_step;
    }
  }
}

SimTime ClockState::physical_time_of(SimTime local, const TemperatureProfile* env) const {
  const int64_t ahead = (local - local_time()).count();
  if (ahead <= 0) return last_update_;
  const double rate = 1.0 + current_frac_freq(env);
  const double dt = (static_cast<double>(ahead) - remainder_ps_) / rate;
  return last_update_ + SimDuration(std::max<int64_t>(0, std::llround(dt)));
}

ClockState advance(ClockState clock, SimTime to, const TemperatureProfile& env) {
  clock.advance(to, env);
  return clock;
}

Timestamp read_local(const ClockState& clock, SimTime at) {
  if (at != clock.last_update()) {
    throw PreconditionError("read_local must follow an advance to the same instant");
  }
  return Timestamp{clock.tick_count(), clock.model().period_ps()};
}

// --- Servo -------------------------------------------------------------------

ServoState attach_servo(const OscillatorModel& model, ServoConfig config) {
  if (!model.tunable) throw ConfigError("servo attachment requires a tunable oscillator");
  if (config.steer_limit <= 0.0 || config.steer_limit >= 1.0) {
    throw ConfigError("servo steer_limit must lie in (0, 1)");
  }
  if (config.kp < 0.0 || config.ki < 0.0) throw ConfigError("servo gains must be non-negative");
  if (config.lock_count < 1) throw ConfigError("servo lock_count must be at least 1");
  return ServoState{config};
}

ServoOutput servo_step(ServoState servo, SimDuration measured_offset, SimDuration interval) {
  if (interval <= SimDuration{}) throw PreconditionError("servo interval must be positive");
  const auto& cfg = servo.config;
  const double x = static_cast<double>(measured_offset.count()) /
                   static_cast<double>(interval.count());

  const double integral = servo.integral_acc + x;
  double raw = -(cfg.kp * x + cfg.ki * integral);
  double correction = std::clamp(raw, -cfg.steer_limit, cfg.steer_limit);
  // Integrate only while the output is not pushed further into saturation.
  if (correction == raw || (raw > 0) != (x < 0)) {
    servo.integral_acc = std::clamp(integral, -cfg.steer_limit / std::max(cfg.ki, 1e-300),
                                    cfg.steer_limit / std::max(cfg.ki, 1e-300));
  }

  if (measured_offset.abs() < cfg.lock_threshold) {
    servo.consecutive_small = std::min(servo.consecutive_small + 1, cfg.lock_count);
  } else {
    servo.consecutive_small = 0;
  }
  servo.locked = servo.consecutive_small >= cfg.lock_count;
  return ServoOutput{servo, correction};
}

// --- Holdover ----------------------------------------------------------------

double holdover_bound_seconds(double residual_frac_freq, double aging_per_s, double duration_s) {
  return std::abs(residual_frac_freq) * duration_s +
         0.5 * std::abs(aging_per_s) * duration_s * duration_s;
}

double holdover_horizon_seconds(double residual_frac_freq, double aging_per_s, double bound_s) {
  const double r = std::abs(residual_frac_freq);
  const double a = 0.5 * std::abs(aging_per_s);
  if (bound_s <= 0.0) return 0.0;
  if (a == 0.0) {
    return r == 0.0 ? std::numeric_limits<double>::infinity() : bound_s / r;
  }
  // Positive root of a D^2 + r D - B = 0, in the cancellation-free form.
  return 2.0 * bound_s / (r + std::sqrt(r * r + 4.0 * a * bound_s));
}

SimDuration holdover(const ClockState& clock, SimTime loss_at, SimDuration duration,
                     const TemperatureProfile* env) {
  if (loss_at != clock.last_update()) {
    throw PreconditionError("holdover is evaluated at the clock's last update");
  }
  if (duration < SimDuration{}) throw PreconditionError("holdover duration must be non-negative");
  // The temperature contribution is bounded separately below.
  const double residual = clock.current_frac_freq(nullptr);
  const double d = duration.seconds();
  double bound = holdover_bound_seconds(residual, clock.model().aging_per_s, d);
  if (env != nullptr && !env->empty()) {
    bound += std::abs(clock.model().temp_coeff) * env->max_abs_deviation(loss_at, loss_at + duration) * d;
  }
  return SimDuration::from_seconds(bound);
}

}  // namespace chronosim
