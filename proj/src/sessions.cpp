#include "chronosim/sessions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace chronosim {

namespace {
constexpr std::array<std::pair<ProtocolKind, std::string_view>, 6> kProtocolNames{{
    {ProtocolKind::NTP_STYLE, "NTP_STYLE"},
    {ProtocolKind::PTP_HW, "PTP_HW"},
    {ProtocolKind::TWSTT, "TWSTT"},
    {ProtocolKind::ROUND_TRIP, "ROUND_TRIP"},
    {ProtocolKind::WHITE_RABBIT, "WHITE_RABBIT"},
    {ProtocolKind::GNSS, "GNSS"},
}};

SimTime floor_to(SimTime t, int64_t period) { return SimTime(floor_div(t.ps(), period) * period); }
}  // namespace

std::string_view to_string(ProtocolKind k) {
  for (const auto& [kind, name] : kProtocolNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<ProtocolKind> parse_protocol_kind(std::string_view name) {
  for (const auto& [kind, n] : kProtocolNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

PathModel reversed(const PathModel& p) {
  PathModel r = p;
  std::swap(r.base_delay_fwd, r.base_delay_bwd);
  return r;
}

FiberLink reversed(const FiberLink& f) {
  FiberLink r = f;
  std::swap(r.index_fwd, r.index_bwd);
  r.calibrated_asymmetry = -f.calibrated_asymmetry;
  return r;
}

Transit cross(const Medium& m, Direction dir, bool physical_layer_only) {
  Transit t;
  if (m.fiber) t.delay += fiber_delay(*m.fiber, dir);
  if (m.path && !physical_layer_only) {
    if (m.rng == nullptr) throw PreconditionError("a packet path needs a random stream");
    if (sample_drop(*m.path, *m.rng)) {
      t.dropped = true;
      return t;
    }
    const SimDuration d = sample_delay(*m.path, dir, *m.rng);
    const SimDuration base = dir == Direction::Forward ? m.path->base_delay_fwd : m.path->base_delay_bwd;
    t.delay += d;
    t.residence = d - base;
  }
  return t;
}

// --- SyncSession -------------------------------------------------------------

void SyncSession::start(SimTime first) { schedule_exchange(first); }

void SyncSession::schedule_exchange(SimTime at) {
  queue_.schedule(at, [this](SimTime t) {
    ++stats_.exchanges;
    if (config_.max_exchanges == 0 || stats_.exchanges < config_.max_exchanges) {
      schedule_exchange(t + config_.interval);
    }
    exchange(t);
  });
}

void SyncSession::complete(SimTime at, ClockState& slave, ServoState* servo,
                           const SyncEstimate& est, double base_steer) {
  if (est.flagged) {
    ++stats_.flagged;
    return;
  }
  ++stats_.completed;
  stats_.last = est;
  if (observer_) observer_(at, est);
  if (!config_.steer) return;
  if (servo != nullptr) {
    auto out = servo_step(*servo, est.offset_delta, config_.interval);
    *servo = out.state;
    slave.set_steering(base_steer + out.correction);
  } else if (base_steer != 0.0) {
    slave.set_steering(base_steer);
  }
}

// --- NTP_STYLE / PTP_HW ------------------------------------------------------

TwoWaySession::TwoWaySession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg,
                             ProtocolKind kind, Endpoint a, Endpoint b, Medium medium,
                             ServoState* servo)
    : SyncSession(q, env, cfg), kind_(kind), a_(a), b_(b), medium_(std::move(medium)), servo_(servo) {
  if (kind_ != ProtocolKind::NTP_STYLE && kind_ != ProtocolKind::PTP_HW) {
    throw ConfigError("TwoWaySession runs NTP_STYLE or PTP_HW only");
  }
  if (kind_ == ProtocolKind::PTP_HW) {
    a_.mode = TimestampMode::Hardware;
    b_.mode = TimestampMode::Hardware;
  }
}

SimTime TwoWaySession::stamp(const Endpoint& e) const {
  if (e.mode == TimestampMode::Hardware) return floor_to(e.clock->edge_time(), config_.hw_timestamp_period_ps);
  return e.clock->edge_time();
}

SimDuration TwoWaySession::stack_delay(const Endpoint& e) const {
  if (e.mode == TimestampMode::Hardware || e.sw_jitter_hi <= SimDuration{}) return {};
  if (e.sw_rng == nullptr) throw PreconditionError("software timestamping needs a random stream");
  return SimDuration(std::uniform_int_distribution<int64_t>(0, e.sw_jitter_hi.count())(*e.sw_rng));
}

void TwoWaySession::exchange(SimTime p1) {
  advance(*b_.clock, p1);
  const SimTime t_b1 = stamp(b_);
  const Transit fwd = cross(medium_, Direction::Forward);
  if (fwd.dropped) {
    ++stats_.dropped;
    return;
  }
  const bool tc = kind_ == ProtocolKind::PTP_HW && config_.transparent_clocks;
  const int64_t hw = config_.hw_timestamp_period_ps;
  auto correction = [tc, hw](const Transit& tr) {
    return tc ? SimDuration(floor_div(tr.residence.count(), hw) * hw) : SimDuration{};
  };

  const SimTime rx_a = p1 + stack_delay(b_) + fwd.delay + stack_delay(a_);
  queue_.schedule(rx_a, [=, this](SimTime p2) {
    advance(*a_.clock, p2);
    const SimTime t_a2 = stamp(a_) - correction(fwd);
    queue_.schedule(p2 + config_.turnaround, [=, this](SimTime p3) {
      advance(*a_.clock, p3);
      const SimTime t_a3 = stamp(a_);
      const Transit bwd = cross(medium_, Direction::Backward);
      if (bwd.dropped) {
        ++stats_.dropped;
        return;
      }
      const SimTime rx_b = p3 + stack_delay(a_) + bwd.delay + stack_delay(b_);
      queue_.schedule(rx_b, [=, this](SimTime p4) {
        advance(*b_.clock, p4);
        const SimTime t_b4 = stamp(b_) - correction(bwd);
        const auto est = two_way_estimate(NtpStyleRecord{t_b1, t_a2, t_a3, t_b4});
        complete(p4, *b_.clock, servo_, est);
      });
    });
  });
}

// --- TWSTT -------------------------------------------------------------------

TwsttSession::TwsttSession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg,
                           Endpoint a, Endpoint b, Medium medium, ServoState* servo)
    : SyncSession(q, env, cfg), a_(a), b_(b), medium_(std::move(medium)), servo_(servo) {}

void TwsttSession::exchange(SimTime q) {
  // Both clocks emit when they read q + margin.
  const uint64_t round = rounds_.size();
  rounds_.emplace_back();
  advance(*a_.clock, q);
  advance(*b_.clock, q);
  const SimTime target = q + config_.twstt_margin;
  const SimTime pa = std::max(q, a_.clock->physical_time_of(target, &env_));
  const SimTime pb = std::max(q, b_.clock->physical_time_of(target, &env_));
  queue_.schedule(pa, [this, round](SimTime p) { emit(p, false, round); });
  queue_.schedule(pb, [this, round](SimTime p) { emit(p, true, round); });
}

void TwsttSession::emit(SimTime p, bool from_b, uint64_t round) {
  Endpoint& self = from_b ? b_ : a_;
  advance(*self.clock, p);
  (from_b ? rounds_[round].start_b : rounds_[round].start_a) = self.clock->edge_time();
  const Transit tr = cross(medium_, from_b ? Direction::Forward : Direction::Backward);
  if (tr.dropped) {
    ++stats_.dropped;
    return;
  }
  queue_.schedule(p + tr.delay, [this, from_b, round](SimTime t) {
    Endpoint& other = from_b ? a_ : b_;
    advance(*other.clock, t);
    (from_b ? rounds_[round].arrive_a : rounds_[round].arrive_b) = other.clock->edge_time();
    try_finish(t, round);
  });
}

void TwsttSession::try_finish(SimTime at, uint64_t round) {
  const Pending& r = rounds_[round];
  if (!r.start_a || !r.start_b || !r.arrive_a || !r.arrive_b) return;
  const TwsttRecord rec{*r.arrive_a - *r.start_a, *r.arrive_b - *r.start_b};
  if (rec.tau_a <= SimDuration{} || rec.tau_b <= SimDuration{}) {
    ++stats_.invalid;
    return;
  }
  complete(at, *b_.clock, servo_, twstt_estimate(rec));
}

// --- ROUND_TRIP --------------------------------------------------------------

RoundTripSession::RoundTripSession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg,
                                   Endpoint a, Endpoint b, Medium medium, ServoState* servo)
    : SyncSession(q, env, cfg), a_(a), b_(b), medium_(std::move(medium)), servo_(servo) {}

void RoundTripSession::exchange(SimTime p1) {
  advance(*b_.clock, p1);
  const SimTime start = b_.clock->edge_time();
  const Transit out = cross(medium_, Direction::Forward);
  const Transit back = cross(medium_, Direction::Backward);
  if (out.dropped || back.dropped) {
    ++stats_.dropped;
    return;
  }
  const SimTime p_back = p1 + out.delay + config_.reflection_delay + back.delay;
  queue_.schedule(p_back, [=, this](SimTime p2) {
    advance(*b_.clock, p2);
    const SimDuration tau = b_.clock->edge_time() - start;
    queue_.schedule(p2 + config_.turnaround, [=, this](SimTime p3) {
      advance(*a_.clock, p3);
      const SimTime t_a = a_.clock->edge_time();
      const Transit one_way = cross(medium_, Direction::Backward);
      if (one_way.dropped) {
        ++stats_.dropped;
        return;
      }
      queue_.schedule(p3 + one_way.delay, [=, this](SimTime p4) {
        advance(*b_.clock, p4);
        const SimTime t_b = b_.clock->edge_time();
        complete(p4, *b_.clock, servo_, round_trip_estimate(RoundTripRecord{tau, t_a, t_b}));
      });
    });
  });
}

// --- WHITE_RABBIT ------------------------------------------------------------

WhiteRabbitSession::WhiteRabbitSession(EventQueue& q, const TemperatureProfile& env,
                                       SessionConfig cfg, Endpoint a, Endpoint b, FiberLink link,
                                       ServoState* servo)
    : SyncSession(q, env, cfg), a_(a), b_(b), link_(link), servo_(servo) {
  link_.validate();
  medium_.fiber = link_;
}

SimTime WhiteRabbitSession::fine_stamp(const ClockState& own, const ClockState& other,
                                       std::optional<PhaseFraction>* phase_out) const {
  const int64_t period = config_.hw_timestamp_period_ps;
  const SimTime event = own.edge_time();
  const SimTime coarse = floor_to(event, period);
  const EdgeStream local_clock{coarse, period, own.current_frac_freq(&env_)};
  const EdgeStream carrier{event, period, other.current_frac_freq(&env_)};
  const PhaseFraction phase =
      phase_measure(local_clock, carrier, config_.phase_resolution_ps, config_.syntonization_tolerance);
  if (phase_out != nullptr) *phase_out = phase;
  return coarse + SimDuration(phase.ps);
}

void WhiteRabbitSession::exchange(SimTime p1) {
  ClockState& A = *a_.clock;
  ClockState& B = *b_.clock;
  advance(A, p1);
  advance(B, p1);
  if (config_.syntonize) {
    // SyncE: B's oscillator follows the carrier recovered from A.
    syntonization_steer_ = A.current_frac_freq(&env_) - B.natural_frac_freq(&env_);
    B.set_steering(syntonization_steer_);
  }

  SimTime t_b1;
  try {
    t_b1 = fine_stamp(B, A);
  } catch (const MeasurementError&) {
    ++stats_.invalid;
    return;
  }
  const SimDuration fwd = cross(medium_, Direction::Forward, true).delay;
  queue_.schedule(p1 + fwd, [=, this](SimTime p2) {
    advance(*a_.clock, p2);
    SimTime t_a2;
    try {
      t_a2 = fine_stamp(*a_.clock, *b_.clock);
    } catch (const MeasurementError&) {
      ++stats_.invalid;
      return;
    }
    queue_.schedule(p2 + config_.turnaround, [=, this](SimTime p3) {
      advance(*a_.clock, p3);
      SimTime t_a3;
      try {
        t_a3 = fine_stamp(*a_.clock, *b_.clock);
      } catch (const MeasurementError&) {
        ++stats_.invalid;
        return;
      }
      const SimDuration bwd = cross(medium_, Direction::Backward, true).delay;
      queue_.schedule(p3 + bwd, [=, this](SimTime p4) {
        advance(*b_.clock, p4);
        std::optional<PhaseFraction> phase;
        SimTime t_b4;
        try {
          t_b4 = fine_stamp(*b_.clock, *a_.clock, &phase);
        } catch (const MeasurementError&) {
          ++stats_.invalid;
          return;
        }
        SyncEstimate est = two_way_estimate(NtpStyleRecord{t_b1, t_a2, t_a3, t_b4});
        est.phase_correction = phase;
        if (config_.apply_calibration) {
          est = apply_asymmetry_correction(est, link_.calibrated_asymmetry);
        }
        complete(p4, *b_.clock, servo_, est, config_.syntonize ? syntonization_steer_ : 0.0);
      });
    });
  });
}

SyncEstimate white_rabbit_sync(ClockState& master, ClockState& slave, ServoState& servo,
                               const FiberLink& link, SessionConfig config, SimTime at,
                               const TemperatureProfile& env) {
  if (!slave.model().tunable) throw ConfigError("White Rabbit needs a tunable slave oscillator");
  EventQueue queue;
  config.max_exchanges = 1;
  WhiteRabbitSession session(queue, env, config, Endpoint{&master}, Endpoint{&slave}, link, &servo);
  session.start(at);
  while (queue.step()) {
  }
  if (!session.stats().last) throw MeasurementError("White Rabbit exchange produced no estimate");
  return *session.stats().last;
}

FiberLink calibrate_link(ClockState master, ClockState slave, FiberLink link,
                         SimDuration known_reference, SessionConfig config, SimTime at, int rounds,
                         uint64_t dither_seed) {
  if (rounds < 1) throw PreconditionError("calibration needs at least one round");
  if (master.last_update() > at || slave.last_update() > at) {
    throw PreconditionError("calibration starts after the clocks' last update");
  }
  // Reference offset is defined at `at`; syntonize from there on so it holds.
  master.advance(at, TemperatureProfile{});
  slave.advance(at, TemperatureProfile{});
  config.max_exchanges = 1;
  config.steer = false;
  config.apply_calibration = false;
  link.calibrated_asymmetry = SimDuration{};

  EventQueue queue;
  const TemperatureProfile env;
  Rng dither(dither_seed);
  std::uniform_int_distribution<int64_t> phase(0, config.hw_timestamp_period_ps - 1);
  long double bias_sum = 0.0L;
  int used = 0;
  for (int k = 0; k < rounds; ++k) {
    WhiteRabbitSession session(queue, env, config, Endpoint{&master}, Endpoint{&slave}, link, nullptr);
    const SimTime start = at + SimDuration::ms(k) + SimDuration(phase(dither));
    // Keep the reference valid: B stays syntonized and unsteered, so the true
    // offset only moves with noise.
    session.start(start);
    while (queue.step()) {
    }
    if (session.stats().last) {
      bias_sum += static_cast<long double>((session.stats().last->offset_delta - known_reference).count());
      ++used;
    }
  }
  if (used == 0) throw MeasurementError("no calibration round produced an estimate");
  // Uncorrected error is -(fwd - bwd) / 2.
  link.calibrated_asymmetry = SimDuration(std::llround(-2.0L * bias_sum / used));
  return link;
}

// --- GNSS --------------------------------------------------------------------

std::vector<Vec3> synthetic_constellation(int count, SimTime t, const Vec3& receiver) {
  constexpr double kOrbitRadius = 26'560'000.0;
  constexpr double kRate = 2.0 * std::numbers::pi / 43'080.0;  // half a sidereal day
  const double rn = std::sqrt(receiver[0] * receiver[0] + receiver[1] * receiver[1] +
                              receiver[2] * receiver[2]);
  // Local frame: up, east, north.
  Vec3 up{receiver[0] / rn, receiver[1] / rn, receiver[2] / rn};
  Vec3 east{-up[1], up[0], 0.0};
  double en = std::hypot(east[0], east[1]);
  if (en < 1e-9) {
    east = {1.0, 0.0, 0.0};
    en = 1.0;
  }
  east = {east[0] / en, east[1] / en, 0.0};
  const Vec3 north{up[1] * east[2] - up[2] * east[1], up[2] * east[0] - up[0] * east[2],
                   up[0] * east[1] - up[1] * east[0]};

  std::vector<Vec3> sats;
  sats.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double az = 2.0 * std::numbers::pi * k / count + kRate * t.seconds();
    const double el = (k == 0) ? 80.0 : 15.0 + 50.0 * ((k * 7) % count) / count;
    const double elr = el * std::numbers::pi / 180.0;
    Vec3 u{};
    for (size_t i = 0; i < 3; ++i) {
      u[i] = std::cos(elr) * (std::sin(az) * east[i] + std::cos(az) * north[i]) + std::sin(elr) * up[i];
    }
    // |receiver + s u| = orbit radius.
    const double ru = receiver[0] * u[0] + receiver[1] * u[1] + receiver[2] * u[2];
    const double s = -ru + std::sqrt(ru * ru - rn * rn + kOrbitRadius * kOrbitRadius);
    sats.push_back({receiver[0] + s * u[0], receiver[1] + s * u[1], receiver[2] + s * u[2]});
  }
  return sats;
}

GnssSession::GnssSession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg,
                         Endpoint receiver, GnssSetup setup, Rng* noise_rng, ServoState* servo)
    : SyncSession(q, env, cfg), rx_(receiver), setup_(std::move(setup)), noise_rng_(noise_rng), servo_(servo) {
  if (setup_.satellites < 4) throw ConfigError("GNSS needs at least 4 satellites");
}

void GnssSession::exchange(SimTime t_r) {
  advance(*rx_.clock, t_r);
  const SimTime local = rx_.clock->edge_time();
  const SimDuration cable = setup_.cable ? cable_delay(*setup_.cable) : SimDuration{};
  std::vector<SatelliteObservation> obs;
  for (const Vec3& sat : synthetic_constellation(setup_.satellites, t_r, setup_.receiver_position)) {
    const double dx = sat[0] - setup_.receiver_position[0];
    const double dy = sat[1] - setup_.receiver_position[1];
    const double dz = sat[2] - setup_.receiver_position[2];
    const SimDuration flight = SimDuration::from_seconds(std::sqrt(dx * dx + dy * dy + dz * dz) / kSpeedOfLight);
    const SimTime sent = t_r - cable - flight;
    SimDuration tau = local - sent;
    if (setup_.pseudorange_noise_ps > 0.0 && noise_rng_ != nullptr) {
      tau += SimDuration(std::llround(setup_.pseudorange_noise_ps *
                                      std::normal_distribution<double>()(*noise_rng_)));
    }
    obs.push_back(SatelliteObservation{sat, sent, tau});
  }
  GnssSolution sol;
  try {
    sol = gnss_solve(obs);
  } catch (const GnssError&) {
    ++stats_.invalid;
    return;
  }
  if (setup_.cable && setup_.compensate_cable) sol = compensate_cable(sol, *setup_.cable);
  last_solution_ = sol;
  SyncEstimate est;
  est.offset_delta = sol.clock_offset;
  complete(t_r, *rx_.clock, servo_, est);
}

}  // namespace chronosim
