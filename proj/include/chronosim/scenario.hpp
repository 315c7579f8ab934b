/**
 * @file scenario.hpp
 * @brief Declarative scenario description and its validation.
 *
 * Scenarios are JSON documents (schema in README.md). validate_config checks
 * everything it can and returns every problem it finds, each prefixed with
 * the path of the offending field.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chronosim/channel.hpp"
#include "chronosim/gnss.hpp"
#include "chronosim/oscillator.hpp"
#include "chronosim/sessions.hpp"

namespace chronosim {

/// Pseudo-endpoint for antenna cables: the sky side of a GNSS receiver.
inline constexpr std::string_view kSkyEndpoint = "SKY";

struct NodeConfig {
  std::string name;
  std::optional<OscillatorClass> preset;
  OscillatorModel model;  ///< preset resolved with the scenario seed, overrides applied
  TimestampMode timestamping = TimestampMode::Hardware;
  SimDuration sw_jitter_hi = SimDuration::us(100);
  SimDuration initial_offset;
};

struct LinkConfig {
  std::string from;  ///< forward direction is from -> to
  std::string to;
  std::optional<PathModel> path;
  std::optional<FiberLink> fiber;
  std::optional<CableModel> cable;
  bool calibrate = false;  ///< run calibrate_link before the scenario starts
};

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::NTP_STYLE;
  std::string master;  ///< unused for GNSS
  SimDuration duration;
  SimTime first_exchange;
  SessionConfig session;
  GnssSetup gnss;
};

struct OutputConfig {
  SimDuration cadence = SimDuration::ms(1);
  double steady_state_fraction = 0.5;
};

struct ScenarioConfig {
  uint64_t seed = 0;
  std::vector<NodeConfig> nodes;
  std::vector<LinkConfig> links;
  ProtocolConfig protocol;
  OutputConfig outputs;
  TemperatureProfile environment;
  nlohmann::json raw;  ///< the validated document, echoed into reports

  const NodeConfig* find_node(std::string_view name) const;
  /// The link joining `a` and `b`, in either orientation.
  const LinkConfig* find_link(std::string_view a, std::string_view b) const;
};

struct ValidationResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value(); }
};

/// Full semantic validation of a parsed document. `seed_override` replaces
/// (or supplies) the document's seed.
ValidationResult validate_document(const nlohmann::json& doc,
                                 std::optional<uint64_t> seed_override = std::nullopt);

/// Parses JSON text first; a syntax error is reported as a single error.
ValidationResult validate_config(std::string_view text,
                                 std::optional<uint64_t> seed_override = std::nullopt);

}  // namespace chronosim
