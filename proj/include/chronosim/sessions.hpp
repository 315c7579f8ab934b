/**
 * @file sessions.hpp
 * @brief Event-level protocol runs: each session repeatedly exchanges signals
 *        between a reference clock A and a disciplined clock B over a medium,
 *        feeds the resulting records to the estimators and steers B.
 *
 * Sessions only touch the clocks, media and random streams handed to them,
 * and only from handlers run by the EventQueue, so every clock is advanced in
 * non-decreasing physical time.
 */
#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "chronosim/channel.hpp"
#include "chronosim/event_queue.hpp"
#include "chronosim/gnss.hpp"
#include "chronosim/oscillator.hpp"
#include "chronosim/protocols.hpp"

namespace chronosim {

enum class ProtocolKind { NTP_STYLE, PTP_HW, TWSTT, ROUND_TRIP, WHITE_RABBIT, GNSS };

std::string_view to_string(ProtocolKind k);
std::optional<ProtocolKind> parse_protocol_kind(std::string_view name);

enum class TimestampMode { Hardware, Software };

/// One side of an exchange.
struct Endpoint {
  ClockState* clock = nullptr;
  TimestampMode mode = TimestampMode::Hardware;
  /// Software stamps are taken U(0, sw_jitter_hi) away from the wire event.
  SimDuration sw_jitter_hi = SimDuration::us(100);
  Rng* sw_rng = nullptr;
};

/// What a message crosses between B and A. Forward is B -> A.
struct Medium {
  std::optional<PathModel> path;
  std::optional<FiberLink> fiber;
  Rng* rng = nullptr;
};

/// Swaps the roles of forward and backward.
PathModel reversed(const PathModel& p);
FiberLink reversed(const FiberLink& f);

struct SessionConfig {
  SimDuration interval = SimDuration::sec(1);
  /// Gap between receiving a request and sending the response.
  SimDuration turnaround = SimDuration::us(10);
  /// Period of the hardware timestamping clock (125 MHz).
  int64_t hw_timestamp_period_ps = 8000;
  ServoConfig servo;
  /// PTP_HW: switches report queueing residence, quantized to the hardware
  /// period, which the receiver removes.
  bool transparent_clocks = true;
  /// ROUND_TRIP: processing time at the reflector, not compensated.
  SimDuration reflection_delay;
  /// WHITE_RABBIT parameters.
  int64_t phase_resolution_ps = 10;
  bool syntonize = true;
  double syntonization_tolerance = 1e-9;
  bool apply_calibration = true;
  /// TWSTT: both sides prepare their emission this long in advance.
  SimDuration twstt_margin = SimDuration::ms(1);
  /// Stop after this many exchanges; 0 runs until the queue is abandoned.
  uint64_t max_exchanges = 0;
  /// When false, estimates are reported but B is not steered.
  bool steer = true;
};

struct SessionStats {
  uint64_t exchanges = 0;
  uint64_t completed = 0;
  uint64_t dropped = 0;
  uint64_t flagged = 0;
  uint64_t invalid = 0;
  std::optional<SyncEstimate> last;
};

class SyncSession {
 public:
  using EstimateObserver = std::function<void(SimTime, const SyncEstimate&)>;

  SyncSession(EventQueue& queue, const TemperatureProfile& env, SessionConfig config)
      : queue_(queue), env_(env), config_(config) {}
  virtual ~SyncSession() = default;
  SyncSession(const SyncSession&) = delete;
  SyncSession& operator=(const SyncSession&) = delete;

  /// Schedules the first exchange at physical time `first`; every later one
  /// follows at config.interval spacing.
  void start(SimTime first);

  const SessionStats& stats() const { return stats_; }
  const SessionConfig& config() const { return config_; }
  void set_observer(EstimateObserver obs) { observer_ = std::move(obs); }

 protected:
  virtual void exchange(SimTime at) = 0;

  void advance(ClockState& c, SimTime t) { c.advance(t, env_); }
  /// Reports the estimate and, unless it is flagged, steers `slave`.
  void complete(SimTime at, ClockState& slave, ServoState* servo, const SyncEstimate& est,
                double base_steer = 0.0);

  EventQueue& queue_;
  const TemperatureProfile& env_;
  SessionConfig config_;
  SessionStats stats_;

 private:
  void schedule_exchange(SimTime at);
  EstimateObserver observer_;
};

/// Transit of one message across a medium.
struct Transit {
  SimDuration delay;
  SimDuration residence;  ///< queueing part of `delay`
  bool dropped = false;
};
Transit cross(const Medium& m, Direction dir, bool physical_layer_only = false);

/// NTP_STYLE (endpoint timestamp modes honoured) and PTP_HW (hardware stamps
/// on both ends, transparent-clock correction).
class TwoWaySession : public SyncSession {
 public:
  TwoWaySession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg, ProtocolKind kind,
                Endpoint a, Endpoint b, Medium medium, ServoState* servo);

 protected:
  void exchange(SimTime at) override;

 private:
  SimTime stamp(const Endpoint& e) const;
  SimDuration stack_delay(const Endpoint& e) const;

  ProtocolKind kind_;
  Endpoint a_, b_;
  Medium medium_;
  ServoState* servo_;
};

/// Both sides emit when their own clock reads the same value and time the
/// arrival of the other's signal with a picosecond interval counter.
class TwsttSession : public SyncSession {
 public:
  TwsttSession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg, Endpoint a,
               Endpoint b, Medium medium, ServoState* servo);

 protected:
  void exchange(SimTime at) override;

 private:
  struct Pending {
    std::optional<SimTime> start_a, start_b, arrive_a, arrive_b;
  };
  void emit(SimTime p, bool from_b, uint64_t round);
  void try_finish(SimTime at, uint64_t round);

  Endpoint a_, b_;
  Medium medium_;
  ServoState* servo_;
  std::vector<Pending> rounds_;
};

/// B's signal is reflected by A; then A sends a one-way timestamp.
class RoundTripSession : public SyncSession {
 public:
  RoundTripSession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg, Endpoint a,
                   Endpoint b, Medium medium, ServoState* servo);

 protected:
  void exchange(SimTime at) override;

 private:
  Endpoint a_, b_;
  Medium medium_;
  ServoState* servo_;
};

/// Syntonize B to A, two-way exchange with coarse hardware timestamps,
/// complete every timestamp with a phase measurement, remove the calibrated
/// fiber asymmetry, steer B.
class WhiteRabbitSession : public SyncSession {
 public:
  WhiteRabbitSession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg, Endpoint a,
                     Endpoint b, FiberLink link, ServoState* servo);

 protected:
  void exchange(SimTime at) override;

 private:
  /// Coarse tick plus measured phase of the event against the local clock.
  SimTime fine_stamp(const ClockState& own, const ClockState& other,
                     std::optional<PhaseFraction>* phase_out = nullptr) const;

  Endpoint a_, b_;
  FiberLink link_;
  Medium medium_;
  ServoState* servo_;
  double syntonization_steer_ = 0.0;
};

/// Synthetic constellation for the GNSS session: `count` satellites on a
/// 26,560 km shell, all above the receiver's horizon, slowly rotating.
std::vector<Vec3> synthetic_constellation(int count, SimTime t, const Vec3& receiver);

struct GnssSetup {
  Vec3 receiver_position{6'371'000.0, 0.0, 0.0};
  int satellites = 6;
  double pseudorange_noise_ps = 0.0;
  std::optional<CableModel> cable;
  bool compensate_cable = true;
};

/// Disciplines a receiver clock to system time (the physical axis).
class GnssSession : public SyncSession {
 public:
  GnssSession(EventQueue& q, const TemperatureProfile& env, SessionConfig cfg, Endpoint receiver,
              GnssSetup setup, Rng* noise_rng, ServoState* servo);

  const std::optional<GnssSolution>& last_solution() const { return last_solution_; }

 protected:
  void exchange(SimTime at) override;

 private:
  Endpoint rx_;
  GnssSetup setup_;
  Rng* noise_rng_;
  ServoState* servo_;
  std::optional<GnssSolution> last_solution_;
};

/// One complete White Rabbit exchange starting at `at`, run on its own event
/// queue; leaves both clocks advanced to the end of the exchange and B
/// steered. MeasurementError if the phase measurement was rejected.
SyncEstimate white_rabbit_sync(ClockState& master, ClockState& slave, ServoState& servo,
                               const FiberLink& link, SessionConfig config, SimTime at,
                               const TemperatureProfile& env = {});

/// Calibrates the fiber asymmetry against a known true offset (B - A) at
/// `at`, averaging `rounds` exchanges with dithered start times. The clocks
/// are copies; the caller's clocks are untouched.
FiberLink calibrate_link(ClockState master, ClockState slave, FiberLink link,
                         SimDuration known_reference, SessionConfig config, SimTime at,
                         int rounds = 16, uint64_t dither_seed = 1);

}  // namespace chronosim
