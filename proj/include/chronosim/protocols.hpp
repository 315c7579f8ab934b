/**
 * @file protocols.hpp
 * @brief Two-way time transfer estimators and phase measurement.
 *
 * Naming follows the two-clock picture: clock A is the reference, clock B the
 * clock being compared against it, and the offset is delta = t_B - t_A. The
 * "forward" path is B -> A and the "backward" path is A -> B. On an
 * asymmetric path every two-way variant reports
 *
 *     delta_estimated = delta + (d_bwd - d_fwd) / 2.
 *
 * All estimators are pure integer arithmetic. Halving rounds toward zero.
 */
#pragma once

#include <optional>
#include <stdexcept>
#include <variant>

#include "chronosim/timebase.hpp"

namespace chronosim {

/// Request/response with four timestamps (NTP, PTP).
struct NtpStyleRecord {
  SimTime t_b1;  ///< request sent, clock B
  SimTime t_a2;  ///< request received, clock A
  SimTime t_a3;  ///< response sent, clock A
  SimTime t_b4;  ///< response received, clock B
};

/// Simultaneous emission; each side measures the interval from its own
/// emission to the arrival of the other's signal.
struct TwsttRecord {
  SimDuration tau_a;
  SimDuration tau_b;
};

/// Loop-back round trip `tau` measured at B, followed by a one-way
/// timestamp sent by A at t_a and received by B at t_b.
struct RoundTripRecord {
  SimDuration tau;
  SimTime t_a;
  SimTime t_b;
};

using ExchangeRecord = std::variant<NtpStyleRecord, TwsttRecord, RoundTripRecord>;

struct SyncEstimate {
  SimDuration delay_d;
  SimDuration offset_delta;  ///< t_B - t_A
  std::optional<PhaseFraction> phase_correction;
  SimDuration asymmetry_correction_applied;
  /// Set when the computed delay is negative: gross asymmetry or corrupted
  /// timestamps. A flagged estimate must not drive a servo.
  bool flagged = false;
};

/// d = [(t_B4 - t_B1) - (t_A3 - t_A2)] / 2, delta = [(t_B4 - t_A3) + (t_B1 - t_A2)] / 2.
/// PreconditionError if t_B4 < t_B1 or t_A3 < t_A2.
SyncEstimate two_way_estimate(const NtpStyleRecord& rec);

/// d = (tau_B + tau_A) / 2, delta = (tau_B - tau_A) / 2.
/// PreconditionError unless both intervals are positive.
SyncEstimate twstt_estimate(const TwsttRecord& rec);

/// d = tau / 2, delta = t_B - t_A - d. PreconditionError if tau < 0.
SyncEstimate round_trip_estimate(const RoundTripRecord& rec);

/// Dispatches on the record variant.
SyncEstimate estimate(const ExchangeRecord& rec);

/// Removes a known path asymmetry (fwd - bwd) from an estimate:
/// delta += asymmetry / 2, d is left as the mean one-way delay.
SyncEstimate apply_asymmetry_correction(SyncEstimate est, SimDuration asymmetry);

/// A periodic edge stream as seen on one clock's time axis. `frac_freq` is the
/// fractional frequency of the source, used only for the syntonization check.
struct EdgeStream {
  SimTime edge;        ///< any one rising edge
  int64_t period_ps = 0;
  double frac_freq = 0.0;
};

class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sub-period offset from an edge of `a` to the next edge of `b` at or after
/// it, floored to the resolution grid. Throws MeasurementError when the
/// streams are not syntonized: different nominal periods, or fractional
/// frequencies more than `tolerance` apart.
PhaseFraction phase_measure(const EdgeStream& a, const EdgeStream& b, int64_t resolution_ps,
                            double tolerance = 1e-9);

}  // namespace chronosim
