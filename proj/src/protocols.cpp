#include "chronosim/protocols.hpp"

#include <cmath>

namespace chronosim {

SyncEstimate two_way_estimate(const NtpStyleRecord& rec) {
  if (rec.t_b4 < rec.t_b1) throw PreconditionError("t_B4 precedes t_B1");
  if (rec.t_a3 < rec.t_a2) throw PreconditionError("t_A3 precedes t_A2");
  SyncEstimate est;
  est.delay_d = ((rec.t_b4 - rec.t_b1) - (rec.t_a3 - rec.t_a2)).half();
  est.offset_delta = ((rec.t_b4 - rec.t_a3) + (rec.t_b1 - rec.t_a2)).half();
  est.flagged = est.delay_d < SimDuration{};
  return est;
}

SyncEstimate twstt_estimate(const TwsttRecord& rec) {
  if (rec.tau_a <= SimDuration{} || rec.tau_b <= SimDuration{}) {
    throw PreconditionError("TWSTT intervals must be positive");
  }
  SyncEstimate est;
  est.delay_d = (rec.tau_b + rec.tau_a).half();
  est.offset_delta = (rec.tau_b - rec.tau_a).half();
  return est;
}

SyncEstimate round_trip_estimate(const RoundTripRecord& rec) {
  if (rec.tau < SimDuration{}) throw PreconditionError("round-trip interval must be non-negative");
  SyncEstimate est;
  est.delay_d = rec.tau.half();
  est.offset_delta = rec.t_b - rec.t_a - est.delay_d;
  return est;
}

SyncEstimate estimate(const ExchangeRecord& rec) {
  struct Visitor {
    SyncEstimate operator()(const NtpStyleRecord& r) const { return two_way_estimate(r); }
    SyncEstimate operator()(const TwsttRecord& r) const { return twstt_estimate(r); }
    SyncEstimate operator()(const RoundTripRecord& r) const { return round_trip_estimate(r); }
  };
  return std::visit(Visitor{}, rec);
}

SyncEstimate apply_asymmetry_correction(SyncEstimate est, SimDuration asymmetry) {
  est.offset_delta += asymmetry.half();
  est.asymmetry_correction_applied += asymmetry;
  return est;
}

PhaseFraction phase_measure(const EdgeStream& a, const EdgeStream& b, int64_t resolution_ps,
                            double tolerance) {
  if (a.period_ps <= 0 || b.period_ps <= 0) throw PreconditionError("edge periods must be positive");
  if (resolution_ps <= 0 || resolution_ps > a.period_ps) {
    throw PreconditionError("phase resolution must lie in (0, period]");
  }
  if (a.period_ps != b.period_ps) {
    throw MeasurementError("edge streams have different nominal periods");
  }
  if (!(std::abs(a.frac_freq - b.frac_freq) <= tolerance)) {
    throw MeasurementError("edge streams are not syntonized");
  }
  const int64_t raw = floor_mod((b.edge - a.edge).count(), a.period_ps);
  return PhaseFraction{raw - raw % resolution_ps, resolution_ps};
}

}  // namespace chronosim
