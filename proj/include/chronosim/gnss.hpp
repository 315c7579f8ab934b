// One-way GNSS time transfer: solve receiver position and clock offset from
// satellite pseudoranges,
//
//     (tau_i - offset) * c = |sat_i - receiver|,
//
// with Gauss-Newton (least squares when more than four satellites are used).
#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chronosim/channel.hpp"
#include "chronosim/timebase.hpp"

namespace chronosim {

using Vec3 = std::array<double, 3>;

struct SatelliteObservation {
  Vec3 position;               ///< meters, earth-centred frame
  SimTime send_time;           ///< t_i, system time
  SimDuration measured_delay;  ///< tau_i, receiver clock minus send_time
};

/// Unknowns of the solve.
struct GnssState {
  Vec3 position{0.0, 0.0, 0.0};
  double clock_offset_s = 0.0;
};

struct GnssSolution {
  Vec3 position;
  SimDuration clock_offset;
  int iterations = 0;
  double residual_norm = 0.0;  ///< meters
};

struct GnssSolverOptions {
  int max_iterations = 50;
  double position_tol_m = 1e-4;
  double clock_tol_s = 1e-13;
};

class GnssError : public std::runtime_error {
 public:
  enum class Kind { TooFewObservations, SingularGeometry, NotConverged };
  GnssError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// r_i = (tau_i - offset) * c - |sat_i - position|, meters.
std::vector<double> gnss_residuals(std::span<const SatelliteObservation> obs, const GnssState& s);

/// d r_i / d (x, y, z, offset_s), one row per observation.
std::vector<std::array<double, 4>> gnss_jacobian(std::span<const SatelliteObservation> obs,
                                                 const GnssState& s);

/// Throws GnssError: fewer than four observations, a singular normal matrix,
/// or no convergence within max_iterations. The initial guess defaults to the
/// earth's centre with zero offset.
GnssSolution gnss_solve(std::span<const SatelliteObservation> obs,
                        std::optional<GnssState> initial = std::nullopt,
                        const GnssSolverOptions& options = {});

/// The antenna cable delays every signal by the same amount, which the solve
/// attributes to the receiver clock. Subtracts cable_delay(cable) from the
/// offset; applying it twice over-corrects.
GnssSolution compensate_cable(GnssSolution solution, const CableModel& cable);

}  // namespace chronosim
