#include "chronosim/channel.hpp"

#include <cmath>
#include <random>

namespace chronosim {

namespace {
SimDuration seconds_to_ps(double s) { return SimDuration::from_seconds(s); }
}  // namespace

void PathModel::validate() const {
  if (base_delay_fwd < SimDuration{} || base_delay_bwd < SimDuration{}) {
    throw ConfigError("path base delays must be non-negative");
  }
  if (!(drop_prob >= 0.0 && drop_prob < 1.0)) throw ConfigError("path drop_prob must lie in [0, 1)");
  if (const auto* u = std::get_if<UniformJitter>(&jitter)) {
    if (u->lo < SimDuration{}) throw ConfigError("jitter.lo_ps must be non-negative");
    if (u->hi < u->lo) throw ConfigError("jitter.hi_ps must not be below jitter.lo_ps");
  }
  if (const auto* e = std::get_if<ExponentialTailJitter>(&jitter)) {
    if (e->min < SimDuration{} || e->mean_excess < SimDuration{}) {
      throw ConfigError("exponential jitter parameters must be non-negative");
    }
  }
}

SimDuration sample_delay(const PathModel& path, Direction dir, Rng& rng) {
  const SimDuration base = dir == Direction::Forward ? path.base_delay_fwd : path.base_delay_bwd;
  struct Draw {
    Rng& rng;
    SimDuration operator()(NoJitter) const { return {}; }
    SimDuration operator()(const UniformJitter& u) const {
      if (u.hi == u.lo) return u.lo;
      return SimDuration(std::uniform_int_distribution<int64_t>(u.lo.count(), u.hi.count())(rng));
    }
    SimDuration operator()(const ExponentialTailJitter& e) const {
      if (e.mean_excess == SimDuration{}) return e.min;
      const double x = std::exponential_distribution<double>(1.0)(rng);
      return e.min + SimDuration(std::llround(x * static_cast<double>(e.mean_excess.count())));
    }
  };
  return base + std::visit(Draw{rng}, path.jitter);
}

bool sample_drop(const PathModel& path, Rng& rng) {
  if (path.drop_prob <= 0.0) return false;
  return std::bernoulli_distribution(path.drop_prob)(rng);
}

void FiberLink::validate() const {
  if (!(length_m >= 0.0) || !std::isfinite(length_m)) throw ConfigError("fiber length_m must be >= 0");
  if (!(index_fwd >= 1.0) || !(index_bwd >= 1.0)) {
    throw ConfigError("fiber refractive indices must be >= 1");
  }
}

SimDuration fiber_asymmetry(const FiberLink& link) {
  return seconds_to_ps(link.length_m * (link.index_fwd - link.index_bwd) / kSpeedOfLight);
}

SimDuration fiber_delay(const FiberLink& link, Direction dir) {
  const SimDuration fwd = seconds_to_ps(link.length_m * link.index_fwd / kSpeedOfLight);
  return dir == Direction::Forward ? fwd : fwd - fiber_asymmetry(link);
}

SimDuration cable_delay(const CableModel& cable) {
  if (!(cable.velocity_factor > 0.0 && cable.velocity_factor < 1.0)) {
    throw ConfigError("cable velocity_factor must lie in (0, 1)");
  }
  if (!(cable.length_m >= 0.0)) throw ConfigError("cable length_m must be >= 0");
  return seconds_to_ps(cable.length_m / (cable.velocity_factor * kSpeedOfLight));
}

}  // namespace chronosim
