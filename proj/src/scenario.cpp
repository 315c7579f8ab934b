#include "chronosim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace chronosim {

using nlohmann::json;

namespace {

// Collects errors against a field path while walking the document.
class Checker {
 public:
  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  // Objects only; anything else is reported.
  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, "expected an object");
    return false;
  }

  void known_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, _] : j.items()) {
      bool found = false;
      for (auto key : keys) found = found || key == k;
      if (!found) error(path + "." + k, "unknown field");
    }
  }

  std::optional<int64_t> integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) {
      if (j.is_number_unsigned() && j.get<uint64_t>() > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
        error(path, "outside the picosecond range");
        return std::nullopt;
      }
      return j.get<int64_t>();
    }
    if (j.is_number_float()) {
      const double v = j.get<double>();
      if (std::nearbyint(v) != v) {
        error(path, "must be an integer");
        return std::nullopt;
      }
      if (!(std::abs(v) < 9.2e18)) {
        error(path, "outside the picosecond range");
        return std::nullopt;
      }
      return static_cast<int64_t>(v);
    }
    error(path, "must be an integer");
    return std::nullopt;
  }

  std::optional<SimDuration> duration(const json& parent, const char* key, const std::string& path) {
    if (!parent.contains(key)) return std::nullopt;
    auto v = integer(parent.at(key), path + "." + key);
    if (!v) return std::nullopt;
    return SimDuration(*v);
  }

  std::optional<double> number(const json& parent, const char* key, const std::string& path) {
    if (!parent.contains(key)) return std::nullopt;
    const json& j = parent.at(key);
    if (!j.is_number()) {
      error(path + "." + key, "must be a number");
      return std::nullopt;
    }
    return j.get<double>();
  }

  std::optional<bool> boolean(const json& parent, const char* key, const std::string& path) {
    if (!parent.contains(key)) return std::nullopt;
    const json& j = parent.at(key);
    if (!j.is_boolean()) {
      error(path + "." + key, "must be true or false");
      return std::nullopt;
    }
    return j.get<bool>();
  }

  std::optional<std::string> string(const json& parent, const char* key, const std::string& path) {
    if (!parent.contains(key)) return std::nullopt;
    const json& j = parent.at(key);
    if (!j.is_string()) {
      error(path + "." + key, "must be a string");
      return std::nullopt;
    }
    return j.get<std::string>();
  }

  std::vector<std::string> errors;
};

std::optional<OscillatorModel> parse_oscillator(Checker& c, const json& j, const std::string& path,
                                                uint64_t seed, const std::string& node,
                                                std::optional<OscillatorClass>& preset_out) {
  if (!c.object(j, path)) return std::nullopt;
  c.known_keys(j, path,
               {"preset", "nominal_hz", "freq_bias", "aging_per_s", "temp_coeff",
                "white_phase_noise_ps", "rw_freq_step", "noise_step_ps", "tunable"});
  OscillatorModel m;
  if (auto name = c.string(j, "preset", path)) {
    preset_out = parse_oscillator_class(*name);
    if (!preset_out) {
      c.error(path + ".preset", "unknown preset \"" + *name + "\"");
      return std::nullopt;
    }
    Rng rng = make_stream(seed, "preset:" + node);
    m = preset(*preset_out, rng);
  } else if (!j.contains("nominal_hz")) {
    c.error(path, "needs either \"preset\" or an explicit \"nominal_hz\"");
    return std::nullopt;
  }
  if (auto v = c.number(j, "nominal_hz", path)) m.nominal_hz = *v;
  if (auto v = c.number(j, "freq_bias", path)) m.freq_bias = *v;
  if (auto v = c.number(j, "aging_per_s", path)) m.aging_per_s = *v;
  if (auto v = c.number(j, "temp_coeff", path)) m.temp_coeff = *v;
  if (auto v = c.number(j, "white_phase_noise_ps", path)) m.white_phase_noise_ps = *v;
  if (auto v = c.number(j, "rw_freq_step", path)) m.rw_freq_step = *v;
  if (auto v = c.duration(j, "noise_step_ps", path)) m.noise_step = *v;
  if (auto v = c.boolean(j, "tunable", path)) m.tunable = *v;
  try {
    m.validate();
  } catch (const ConfigError& e) {
    c.error(path, e.what());
    return std::nullopt;
  }
  return m;
}

std::optional<Jitter> parse_jitter(Checker& c, const json& j, const std::string& path) {
  if (!c.object(j, path)) return std::nullopt;
  const auto kind = c.string(j, "kind", path).value_or("");
  if (kind == "none") {
    c.known_keys(j, path, {"kind"});
    return NoJitter{};
  }
  if (kind == "uniform") {
    c.known_keys(j, path, {"kind", "lo_ps", "hi_ps"});
    auto lo = c.duration(j, "lo_ps", path);
    auto hi = c.duration(j, "hi_ps", path);
    if (!lo || !hi) {
      if (!j.contains("lo_ps")) c.error(path + ".lo_ps", "missing");
      if (!j.contains("hi_ps")) c.error(path + ".hi_ps", "missing");
      return std::nullopt;
    }
    bool ok = true;
    if (*lo < SimDuration{}) {
      c.error(path + ".lo_ps", "must not be negative");
      ok = false;
    }
    if (*hi < *lo) {
      c.error(path + ".hi_ps", "must be >= lo_ps");
      ok = false;
    }
    if (!ok) return std::nullopt;
    return UniformJitter{*lo, *hi};
  }
  if (kind == "exponential") {
    c.known_keys(j, path, {"kind", "min_ps", "mean_excess_ps"});
    auto min = c.duration(j, "min_ps", path).value_or(SimDuration{});
    auto mean = c.duration(j, "mean_excess_ps", path);
    if (!mean) {
      if (!j.contains("mean_excess_ps")) c.error(path + ".mean_excess_ps", "missing");
      return std::nullopt;
    }
    if (min < SimDuration{} || *mean < SimDuration{}) {
      c.error(path, "min_ps and mean_excess_ps must not be negative");
      return std::nullopt;
    }
    return ExponentialTailJitter{min, *mean};
  }
  c.error(path + ".kind", "expected \"none\", \"uniform\" or \"exponential\"");
  return std::nullopt;
}

std::optional<PathModel> parse_path(Checker& c, const json& j, const std::string& path) {
  if (!c.object(j, path)) return std::nullopt;
  c.known_keys(j, path, {"base_delay_fwd_ps", "base_delay_bwd_ps", "jitter", "drop_prob"});
  PathModel p;
  const size_t before = c.errors.size();
  if (auto v = c.duration(j, "base_delay_fwd_ps", path)) p.base_delay_fwd = *v;
  if (auto v = c.duration(j, "base_delay_bwd_ps", path)) p.base_delay_bwd = *v;
  else p.base_delay_bwd = p.base_delay_fwd;
  if (p.base_delay_fwd < SimDuration{}) c.error(path + ".base_delay_fwd_ps", "must not be negative");
  if (p.base_delay_bwd < SimDuration{}) c.error(path + ".base_delay_bwd_ps", "must not be negative");
  if (j.contains("jitter")) {
    if (auto jit = parse_jitter(c, j.at("jitter"), path + ".jitter")) p.jitter = *jit;
  }
  if (auto v = c.number(j, "drop_prob", path)) {
    p.drop_prob = *v;
    if (!(p.drop_prob >= 0.0 && p.drop_prob < 1.0)) c.error(path + ".drop_prob", "must be in [0, 1)");
  }
  if (c.errors.size() != before) return std::nullopt;
  try {
    p.validate();
  } catch (const ConfigError& e) {
    c.error(path, e.what());
    return std::nullopt;
  }
  return p;
}

std::optional<FiberLink> parse_fiber(Checker& c, const json& j, const std::string& path) {
  if (!c.object(j, path)) return std::nullopt;
  c.known_keys(j, path, {"length_m", "index_fwd", "index_bwd", "calibrated_asymmetry_ps"});
  FiberLink f;
  if (auto v = c.number(j, "length_m", path)) f.length_m = *v;
  else c.error(path + ".length_m", "missing");
  if (auto v = c.number(j, "index_fwd", path)) f.index_fwd = *v;
  if (auto v = c.number(j, "index_bwd", path)) f.index_bwd = *v;
  if (auto v = c.duration(j, "calibrated_asymmetry_ps", path)) f.calibrated_asymmetry = *v;
  try {
    f.validate();
  } catch (const ConfigError& e) {
    c.error(path, e.what());
    return std::nullopt;
  }
  return f;
}

std::optional<CableModel> parse_cable(Checker& c, const json& j, const std::string& path) {
  if (!c.object(j, path)) return std::nullopt;
  c.known_keys(j, path, {"length_m", "velocity_factor"});
  CableModel m;
  if (auto v = c.number(j, "length_m", path)) m.length_m = *v;
  else c.error(path + ".length_m", "missing");
  if (auto v = c.number(j, "velocity_factor", path)) m.velocity_factor = *v;
  try {
    (void)cable_delay(m);
  } catch (const ConfigError& e) {
    c.error(path, e.what());
    return std::nullopt;
  }
  return m;
}

void parse_servo(Checker& c, const json& j, const std::string& path, ServoConfig& s) {
  if (!c.object(j, path)) return;
  c.known_keys(j, path, {"kp", "ki", "steer_limit", "lock_threshold_ps", "lock_count"});
  if (auto v = c.number(j, "kp", path)) s.kp = *v;
  if (auto v = c.number(j, "ki", path)) s.ki = *v;
  if (auto v = c.number(j, "steer_limit", path)) s.steer_limit = *v;
  if (auto v = c.duration(j, "lock_threshold_ps", path)) s.lock_threshold = *v;
  if (j.contains("lock_count")) {
    if (auto v = c.integer(j.at("lock_count"), path + ".lock_count")) s.lock_count = static_cast<int>(*v);
  }
  if (!(s.steer_limit > 0.0)) c.error(path + ".steer_limit", "must be positive");
  if (s.lock_count < 1) c.error(path + ".lock_count", "must be at least 1");
}

void parse_gnss(Checker& c, const json& j, const std::string& path, GnssSetup& g) {
  if (!c.object(j, path)) return;
  c.known_keys(j, path, {"satellites", "pseudorange_noise_ps", "compensate_cable", "receiver_position_m"});
  if (j.contains("satellites")) {
    if (auto v = c.integer(j.at("satellites"), path + ".satellites")) g.satellites = static_cast<int>(*v);
  }
  if (g.satellites < 4) c.error(path + ".satellites", "at least 4 satellites are needed");
  if (auto v = c.number(j, "pseudorange_noise_ps", path)) {
    g.pseudorange_noise_ps = *v;
    if (*v < 0) c.error(path + ".pseudorange_noise_ps", "must not be negative");
  }
  if (auto v = c.boolean(j, "compensate_cable", path)) g.compensate_cable = *v;
  if (j.contains("receiver_position_m")) {
    const json& p = j.at("receiver_position_m");
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
      c.error(path + ".receiver_position_m", "expected three numbers");
    } else {
      g.receiver_position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      if (std::hypot(g.receiver_position[0], g.receiver_position[1], g.receiver_position[2]) < 1.0) {
        c.error(path + ".receiver_position_m", "must not be the geocentre");
      }
    }
  }
}

void parse_protocol(Checker& c, const json& j, ScenarioConfig& cfg) {
  const std::string path = "protocol";
  if (!c.object(j, path)) return;
  c.known_keys(j, path,
               {"kind", "master", "interval_ps", "duration_ps", "first_exchange_ps", "servo",
                "turnaround_ps", "hw_timestamp_period_ps", "transparent_clocks", "reflection_delay_ps",
                "phase_resolution_ps", "syntonize", "syntonization_tolerance", "apply_calibration",
                "twstt_margin_ps", "gnss"});
  ProtocolConfig& p = cfg.protocol;
  SessionConfig& s = p.session;
  if (auto kind = c.string(j, "kind", path)) {
    if (auto k = parse_protocol_kind(*kind)) p.kind = *k;
    else c.error(path + ".kind", "unknown protocol \"" + *kind + "\"");
  } else if (!j.contains("kind")) {
    c.error(path + ".kind", "missing");
  }
  if (auto m = c.string(j, "master", path)) p.master = *m;
  if (auto d = c.duration(j, "duration_ps", path)) {
    p.duration = *d;
    if (*d <= SimDuration{}) c.error(path + ".duration_ps", "must be positive");
  } else if (!j.contains("duration_ps")) {
    c.error(path + ".duration_ps", "missing");
  }
  if (auto v = c.duration(j, "interval_ps", path)) s.interval = *v;
  if (s.interval <= SimDuration{}) c.error(path + ".interval_ps", "must be positive");
  if (auto v = c.duration(j, "first_exchange_ps", path)) {
    if (*v < SimDuration{}) c.error(path + ".first_exchange_ps", "must not be negative");
    p.first_exchange = SimTime(v->count());
  }
  if (j.contains("servo")) parse_servo(c, j.at("servo"), path + ".servo", s.servo);
  if (auto v = c.duration(j, "turnaround_ps", path)) s.turnaround = *v;
  if (s.turnaround < SimDuration{}) c.error(path + ".turnaround_ps", "must not be negative");
  if (j.contains("hw_timestamp_period_ps")) {
    if (auto v = c.integer(j.at("hw_timestamp_period_ps"), path + ".hw_timestamp_period_ps")) {
      s.hw_timestamp_period_ps = *v;
    }
  }
  if (s.hw_timestamp_period_ps <= 0) c.error(path + ".hw_timestamp_period_ps", "must be positive");
  if (auto v = c.boolean(j, "transparent_clocks", path)) s.transparent_clocks = *v;
  if (auto v = c.duration(j, "reflection_delay_ps", path)) s.reflection_delay = *v;
  if (s.reflection_delay < SimDuration{}) c.error(path + ".reflection_delay_ps", "must not be negative");
  if (j.contains("phase_resolution_ps")) {
    if (auto v = c.integer(j.at("phase_resolution_ps"), path + ".phase_resolution_ps")) s.phase_resolution_ps = *v;
  }
  if (s.phase_resolution_ps <= 0) c.error(path + ".phase_resolution_ps", "must be positive");
  if (auto v = c.boolean(j, "syntonize", path)) s.syntonize = *v;
  if (auto v = c.number(j, "syntonization_tolerance", path)) s.syntonization_tolerance = *v;
  if (!(s.syntonization_tolerance > 0.0)) c.error(path + ".syntonization_tolerance", "must be positive");
  if (auto v = c.boolean(j, "apply_calibration", path)) s.apply_calibration = *v;
  if (auto v = c.duration(j, "twstt_margin_ps", path)) s.twstt_margin = *v;
  if (s.twstt_margin < SimDuration{}) c.error(path + ".twstt_margin_ps", "must not be negative");
  if (j.contains("gnss")) parse_gnss(c, j.at("gnss"), path + ".gnss", p.gnss);
}

void parse_outputs(Checker& c, const json& j, OutputConfig& o) {
  const std::string path = "outputs";
  if (!c.object(j, path)) return;
  c.known_keys(j, path, {"cadence_ps", "steady_state_fraction"});
  if (auto v = c.duration(j, "cadence_ps", path)) o.cadence = *v;
  if (o.cadence <= SimDuration{}) c.error(path + ".cadence_ps", "must be positive");
  if (auto v = c.number(j, "steady_state_fraction", path)) o.steady_state_fraction = *v;
  if (!(o.steady_state_fraction > 0.0 && o.steady_state_fraction <= 1.0)) {
    c.error(path + ".steady_state_fraction", "must be in (0, 1]");
  }
}

void parse_environment(Checker& c, const json& j, TemperatureProfile& env) {
  const std::string path = "environment";
  if (!c.object(j, path)) return;
  c.known_keys(j, path, {"temperature"});
  if (!j.contains("temperature")) return;
  const json& t = j.at("temperature");
  const std::string tp = path + ".temperature";
  if (!c.object(t, tp)) return;
  c.known_keys(t, tp, {"reference_k", "points"});
  const double ref = c.number(t, "reference_k", tp).value_or(298.15);
  std::vector<std::pair<SimTime, double>> points;
  if (t.contains("points")) {
    const json& pts = t.at("points");
    if (!pts.is_array()) {
      c.error(tp + ".points", "expected an array of [t_ps, kelvin] pairs");
      return;
    }
    for (size_t i = 0; i < pts.size(); ++i) {
      const std::string pp = tp + ".points[" + std::to_string(i) + "]";
      const json& pt = pts[i];
      if (!pt.is_array() || pt.size() != 2 || !pt[1].is_number()) {
        c.error(pp, "expected [t_ps, kelvin]");
        continue;
      }
      auto at = c.integer(pt[0], pp + "[0]");
      if (!at) continue;
      points.emplace_back(SimTime(*at), pt[1].get<double>());
    }
  }
  try {
    env = TemperatureProfile(std::move(points), ref);
  } catch (const std::exception& e) {
    c.error(tp, e.what());
  }
}

}  // namespace

const NodeConfig* ScenarioConfig::find_node(std::string_view name) const {
  for (const auto& n : nodes) {
    if (n.name == name) return &n;
  }
  return nullptr;
}

const LinkConfig* ScenarioConfig::find_link(std::string_view a, std::string_view b) const {
  for (const auto& l : links) {
    if ((l.from == a && l.to == b) || (l.from == b && l.to == a)) return &l;
  }
  return nullptr;
}

ValidationResult validate_document(const json& doc, std::optional<uint64_t> seed_override) {
  Checker c;
  ValidationResult result;
  if (!doc.is_object()) {
    result.errors.push_back("(root): expected a JSON object");
    return result;
  }
  c.known_keys(doc, "(root)", {"version", "seed", "nodes", "links", "protocol", "outputs", "environment"});

  ScenarioConfig cfg;
  if (seed_override) {
    cfg.seed = *seed_override;
  } else if (!doc.contains("seed")) {
    c.error("seed", "missing (a seed is mandatory)");
  } else if (!doc.at("seed").is_number_unsigned()) {
    c.error("seed", "must be a non-negative integer");
  } else {
    cfg.seed = doc.at("seed").get<uint64_t>();
  }

  // Nodes.
  std::set<std::string> names;
  if (!doc.contains("nodes") || !doc.at("nodes").is_array() || doc.at("nodes").empty()) {
    c.error("nodes", "expected a non-empty array");
  } else {
    const json& nodes = doc.at("nodes");
    for (size_t i = 0; i < nodes.size(); ++i) {
      const std::string path = "nodes[" + std::to_string(i) + "]";
      const json& n = nodes[i];
      if (!c.object(n, path)) continue;
      c.known_keys(n, path, {"name", "oscillator", "timestamping", "sw_jitter_hi_ps", "initial_offset_ps"});
      NodeConfig node;
      auto name = c.string(n, "name", path);
      if (!name || name->empty()) {
        if (!name && !n.contains("name")) c.error(path + ".name", "missing");
        else if (name) c.error(path + ".name", "must not be empty");
        continue;
      }
      node.name = *name;
      if (node.name == kSkyEndpoint) c.error(path + ".name", "\"SKY\" is reserved");
      if (!names.insert(node.name).second) c.error(path + ".name", "duplicate node \"" + node.name + "\"");
      if (!n.contains("oscillator")) {
        c.error(path + ".oscillator", "missing");
      } else if (auto m = parse_oscillator(c, n.at("oscillator"), path + ".oscillator", cfg.seed, node.name,
                                           node.preset)) {
        node.model = *m;
      }
      if (auto ts = c.string(n, "timestamping", path)) {
        if (*ts == "hw") node.timestamping = TimestampMode::Hardware;
        else if (*ts == "sw") node.timestamping = TimestampMode::Software;
        else c.error(path + ".timestamping", "expected \"hw\" or \"sw\"");
      }
      if (auto v = c.duration(n, "sw_jitter_hi_ps", path)) {
        node.sw_jitter_hi = *v;
        if (*v < SimDuration{}) c.error(path + ".sw_jitter_hi_ps", "must not be negative");
      }
      if (auto v = c.duration(n, "initial_offset_ps", path)) node.initial_offset = *v;
      cfg.nodes.push_back(node);
    }
  }

  // Protocol (needed before links for per-protocol checks).
  if (!doc.contains("protocol")) c.error("protocol", "missing");
  else parse_protocol(c, doc.at("protocol"), cfg);
  if (doc.contains("outputs")) parse_outputs(c, doc.at("outputs"), cfg.outputs);
  if (doc.contains("environment")) parse_environment(c, doc.at("environment"), cfg.environment);

  // Links.
  if (doc.contains("links")) {
    const json& links = doc.at("links");
    if (!links.is_array()) {
      c.error("links", "expected an array");
    } else {
      for (size_t i = 0; i < links.size(); ++i) {
        const std::string path = "links[" + std::to_string(i) + "]";
        const json& l = links[i];
        if (!c.object(l, path)) continue;
        c.known_keys(l, path, {"endpoints", "path", "fiber", "cable", "calibrate"});
        LinkConfig link;
        const json* ep = l.contains("endpoints") ? &l.at("endpoints") : nullptr;
        if (ep == nullptr || !ep->is_array() || ep->size() != 2 || !(*ep)[0].is_string() ||
            !(*ep)[1].is_string()) {
          c.error(path + ".endpoints", "expected two node names");
          continue;
        }
        link.from = (*ep)[0].get<std::string>();
        link.to = (*ep)[1].get<std::string>();
        bool sky = false;
        for (const auto& e : {link.from, link.to}) {
          if (e == kSkyEndpoint) sky = true;
          else if (!names.count(e)) c.error(path + ".endpoints", "undefined node \"" + e + "\"");
        }
        if (link.from == link.to) c.error(path + ".endpoints", "a link needs two distinct endpoints");
        if (l.contains("path")) link.path = parse_path(c, l.at("path"), path + ".path");
        if (l.contains("fiber")) link.fiber = parse_fiber(c, l.at("fiber"), path + ".fiber");
        if (l.contains("cable")) link.cable = parse_cable(c, l.at("cable"), path + ".cable");
        if (auto v = c.boolean(l, "calibrate", path)) link.calibrate = *v;
        if (!l.contains("path") && !l.contains("fiber") && !l.contains("cable")) {
          c.error(path, "needs a path, a fiber or a cable");
        }
        if (sky && (l.contains("path") || l.contains("fiber"))) {
          c.error(path, "a \"SKY\" link carries only an antenna cable");
        }
        if (!sky && l.contains("cable")) c.error(path + ".cable", "cables connect a node to \"SKY\"");
        if (link.calibrate && !l.contains("fiber")) c.error(path + ".calibrate", "only fiber links are calibrated");
        for (const auto& other : cfg.links) {
          if ((other.from == link.from && other.to == link.to) ||
              (other.from == link.to && other.to == link.from)) {
            c.error(path + ".endpoints", "duplicate link " + link.from + " - " + link.to);
          }
        }
        cfg.links.push_back(link);
      }
    }
  }

  // Roles.
  const ProtocolKind kind = cfg.protocol.kind;
  auto node_path = [&](const std::string& name) {
    for (size_t i = 0; i < cfg.nodes.size(); ++i) {
      if (cfg.nodes[i].name == name) return "nodes[" + std::to_string(i) + "]";
    }
    return std::string("nodes");
  };
  if (doc.contains("protocol") && doc.at("protocol").is_object()) {
    if (kind == ProtocolKind::GNSS) {
      for (const auto& n : cfg.nodes) {
        if (!n.model.tunable) c.error(node_path(n.name) + ".oscillator.tunable", "a GNSS receiver must be tunable");
      }
      const size_t cables = static_cast<size_t>(std::count_if(
          cfg.links.begin(), cfg.links.end(), [](const LinkConfig& l) { return l.cable.has_value(); }));
      if (cables != cfg.links.size()) c.error("links", "GNSS scenarios use antenna cables only");
    } else if (cfg.protocol.master.empty()) {
      c.error("protocol.master", "missing");
    } else if (!names.count(cfg.protocol.master)) {
      c.error("protocol.master", "undefined node \"" + cfg.protocol.master + "\"");
    } else {
      const std::string& master = cfg.protocol.master;
      for (const auto& n : cfg.nodes) {
        if (n.name == master) continue;
        if (!n.model.tunable) c.error(node_path(n.name) + ".oscillator.tunable", "a slave must be tunable");
        const LinkConfig* l = cfg.find_link(n.name, master);
        if (l == nullptr) {
          c.error(node_path(n.name), "no link to master \"" + master + "\"");
          continue;
        }
        if (kind == ProtocolKind::WHITE_RABBIT && !l->fiber) {
          c.error("links", "White Rabbit needs a fiber between \"" + n.name + "\" and \"" + master + "\"");
        }
        if (kind != ProtocolKind::WHITE_RABBIT && !l->path && !l->fiber) {
          c.error("links", "no path or fiber between \"" + n.name + "\" and \"" + master + "\"");
        }
      }
    }
    if (cfg.nodes.size() < 2 && kind != ProtocolKind::GNSS) c.error("nodes", "need a master and at least one slave");
    try {
      (void)(cfg.protocol.first_exchange + cfg.protocol.duration);
    } catch (const RangeError&) {
      c.error("protocol.duration_ps", "outside the picosecond range");
    }
  }

  result.errors = std::move(c.errors);
  if (!result.errors.empty()) return result;
  cfg.raw = doc;
  cfg.raw["seed"] = cfg.seed;
  result.config = std::move(cfg);
  return result;
}

ValidationResult validate_config(std::string_view text, std::optional<uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    ValidationResult r;
    r.errors.push_back(std::string("(root): invalid JSON: ") + e.what());
    return r;
  }
  return validate_document(doc, seed_override);
}

}  // namespace chronosim
