// Transmission media between clocks: packet paths, fiber strands and
// antenna cables. Only delay and its variation are modelled.
#pragma once

#include <variant>

#include "chronosim/random.hpp"
#include "chronosim/timebase.hpp"

namespace chronosim {

/// Vacuum light speed, m/s. Also used for air.
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Forward is the B -> A direction: from the node being synchronized (B) to
/// its reference (A), i.e. the direction of a two-way request.
enum class Direction { Forward, Backward };

struct NoJitter {};
struct UniformJitter {
  SimDuration lo;
  SimDuration hi;
};
/// min + Exp(mean_excess): a floor plus a heavy queueing tail.
struct ExponentialTailJitter {
  SimDuration min;
  SimDuration mean_excess;
};
using Jitter = std::variant<NoJitter, UniformJitter, ExponentialTailJitter>;

struct PathModel {
  SimDuration base_delay_fwd;
  SimDuration base_delay_bwd;
  Jitter jitter = NoJitter{};
  double drop_prob = 0.0;

  /// Throws ConfigError for negative delays, an inverted uniform range or a
  /// drop probability outside [0, 1).
  void validate() const;
};

/// Base delay plus one independent jitter draw; never below the base.
SimDuration sample_delay(const PathModel& path, Direction dir, Rng& rng);

/// One Bernoulli(drop_prob) draw.
bool sample_drop(const PathModel& path, Rng& rng);

/// One strand carrying both directions on different wavelengths.
struct FiberLink {
  double length_m = 0.0;
  double index_fwd = 1.4682;
  double index_bwd = 1.4679;
  SimDuration calibrated_asymmetry;  ///< fwd - bwd as known to the protocol

  void validate() const;
};

/// round(length * (index_fwd - index_bwd) / c), in ps.
SimDuration fiber_asymmetry(const FiberLink& link);

/// Forward: round(length * index_fwd / c). Backward: forward minus
/// fiber_asymmetry, so the two always differ by exactly fiber_asymmetry.
SimDuration fiber_delay(const FiberLink& link, Direction dir);

struct CableModel {
  double length_m = 0.0;
  double velocity_factor = 0.66;
};

/// length / (velocity_factor * c), rounded to ps. ConfigError unless
/// 0 < velocity_factor < 1 and length >= 0.
SimDuration cable_delay(const CableModel& cable);

}  // namespace chronosim
