/**
 * @file runner.hpp
 * @brief Runs a validated scenario on the event queue and reports how far
 *        each node's clock strayed from its reference.
 *
 * The offset error of a node synchronized to a master is its local time minus
 * the master's local time (neither with edge jitter). The master itself and
 * GNSS receivers are compared with the physical time axis. Errors are sampled
 * every outputs.cadence from t = 0 to the protocol duration.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chronosim/metrics.hpp"
#include "chronosim/scenario.hpp"
#include "chronosim/sessions.hpp"

namespace chronosim {

inline constexpr std::string_view kVersion = "chronosim 1.0.0";

struct NodeReport {
  std::string name;
  std::string role;       ///< "master", "slave" or "receiver"
  std::string reference;  ///< master name, or "physical"
  StabilityReport steady_state;  ///< over the final steady_state_fraction of the run
  std::optional<SessionStats> session;
  std::optional<FiberLink> link;  ///< fiber as used by the protocol, after calibration
  ErrorSeries series{SimDuration::ms(1)};
};

struct RunReport {
  std::string version{kVersion};
  uint64_t seed = 0;
  ProtocolKind protocol = ProtocolKind::NTP_STYLE;
  double steady_state_fraction = 0.5;
  nlohmann::json scenario;
  std::vector<NodeReport> nodes;

  /// Largest steady-state |error| over the synchronized nodes (all nodes but
  /// the master).
  SimDuration steady_state_max_abs() const;
  /// Largest steady-state rms error over the synchronized nodes.
  SimDuration steady_state_rms() const;

  const NodeReport* find(std::string_view name) const;

  /// Everything except the raw series.
  nlohmann::json to_json() const;
};

/// Executes the scenario. With `out_dir`, writes series_<node>.csv and
/// report.json there (the directory is created if needed).
RunReport run_scenario(const ScenarioConfig& config,
                       const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_outputs(const RunReport& report, const std::filesystem::path& out_dir);

struct ComparisonRow {
  size_t index = 0;  ///< position in the input list
  std::string label;
  SimDuration steady_state_max_abs;
  SimDuration steady_state_rms;
};

/// Runs every config (in parallel) and returns rows sorted by steady-state
/// max |error|, ties kept in input order. ConfigError if the configs do not
/// share nodes, links, environment, outputs and seed.
std::vector<ComparisonRow> compare_protocols(const std::vector<ScenarioConfig>& configs);

/// Sets the global log level from CHRONOSIM_LOG (trace, debug, info, warn,
/// error, critical, off). Unset means warn. Returns false for an unknown
/// value, which leaves the level at warn.
bool init_logging_from_env();

}  // namespace chronosim
