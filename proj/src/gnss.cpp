#include "chronosim/gnss.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace chronosim {

namespace {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double tau_seconds(const SatelliteObservation& o) {
  return static_cast<double>(o.measured_delay.count()) * 1e-12;
}

}  // namespace

std::vector<double> gnss_residuals(std::span<const SatelliteObservation> obs, const GnssState& s) {
  std::vector<double> r;
  r.reserve(obs.size());
  for (const auto& o : obs) {
    r.push_back((tau_seconds(o) - s.clock_offset_s) * kSpeedOfLight - distance(o.position, s.position));
  }
  return r;
}

std::vector<std::array<double, 4>> gnss_jacobian(std::span<const SatelliteObservation> obs,
                                                 const GnssState& s) {
  std::vector<std::array<double, 4>> j;
  j.reserve(obs.size());
  for (const auto& o : obs) {
    const double rho = distance(o.position, s.position);
    j.push_back({(o.position[0] - s.position[0]) / rho, (o.position[1] - s.position[1]) / rho,
                 (o.position[2] - s.position[2]) / rho, -kSpeedOfLight});
  }
  return j;
}

GnssSolution gnss_solve(std::span<const SatelliteObservation> obs, std::optional<GnssState> initial,
                        const GnssSolverOptions& options) {
  if (obs.size() < 4) {
    throw GnssError(GnssError::Kind::TooFewObservations,
                    "need at least 4 satellites, got " + std::to_string(obs.size()));
  }
  for (const auto& o : obs) {
    if (o.measured_delay <= SimDuration{}) throw PreconditionError("measured delay must be positive");
  }

  GnssState s = initial.value_or(GnssState{});
  const auto n = static_cast<Eigen::Index>(obs.size());
  // The clock column is scaled to meters (b = c * offset) for conditioning.
  Eigen::MatrixXd J(n, 4);
  Eigen::VectorXd r(n);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const auto res = gnss_residuals(obs, s);
    const auto jac = gnss_jacobian(obs, s);
    for (Eigen::Index i = 0; i < n; ++i) {
      r(i) = res[static_cast<size_t>(i)];
      for (int k = 0; k < 3; ++k) J(i, k) = jac[static_cast<size_t>(i)][static_cast<size_t>(k)];
      J(i, 3) = -1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(3) > 1e-9 * sv(0))) {
      throw GnssError(GnssError::Kind::SingularGeometry, "satellite geometry is singular");
    }
    const Eigen::Vector4d step = svd.solve(-r);
    for (int k = 0; k < 3; ++k) s.position[static_cast<size_t>(k)] += step(k);
    const double clock_step_s = step(3) / kSpeedOfLight;
    s.clock_offset_s += clock_step_s;

    if (step.head<3>().norm() < options.position_tol_m &&
        std::abs(clock_step_s) < options.clock_tol_s) {
      double norm = 0.0;
      for (double v : gnss_residuals(obs, s)) norm += v * v;
      return GnssSolution{s.position, SimDuration::from_seconds(s.clock_offset_s), iter,
                          std::sqrt(norm)};
    }
  }
  throw GnssError(GnssError::Kind::NotConverged,
                  "no convergence in " + std::to_string(options.max_iterations) + " iterations");
}

GnssSolution compensate_cable(GnssSolution solution, const CableModel& cable) {
  solution.clock_offset -= cable_delay(cable);
  return solution;
}

}  // namespace chronosim
