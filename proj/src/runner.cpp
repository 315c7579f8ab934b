#include "chronosim/runner.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <memory>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace chronosim {

using nlohmann::json;

namespace {

json stats_json(const StabilityReport& r) {
  json adev = json::array();
  for (const auto& p : r.adev) {
    json e{{"tau_ps", p.tau.count()}};
    if (p.adev) e["adev"] = *p.adev;
    else e["error"] = p.error;
    adev.push_back(e);
  }
  return json{{"samples", r.samples},
              {"max_abs_error_ps", r.max_abs_error.count()},
              {"mean_error_ps", r.mean_error.count()},
              {"rms_error_ps", r.rms_error.count()},
              {"adev", adev}};
}

json session_json(const SessionStats& s) {
  json j{{"exchanges", s.exchanges},
         {"completed", s.completed},
         {"dropped", s.dropped},
         {"flagged", s.flagged},
         {"invalid", s.invalid}};
  if (s.last) {
    j["last_delay_ps"] = s.last->delay_d.count();
    j["last_offset_ps"] = s.last->offset_delta.count();
  }
  return j;
}

// Orients a link so that forward runs from `slave` to `master`.
Medium oriented_medium(const LinkConfig& l, const std::string& slave, Rng* rng) {
  Medium m;
  m.rng = rng;
  const bool as_is = l.from == slave;
  if (l.path) m.path = as_is ? *l.path : reversed(*l.path);
  if (l.fiber) m.fiber = as_is ? *l.fiber : reversed(*l.fiber);
  return m;
}

}  // namespace

SimDuration RunReport::steady_state_max_abs() const {
  SimDuration worst;
  for (const auto& n : nodes) {
    if (n.role != "master") worst = std::max(worst, n.steady_state.max_abs_error);
  }
  return worst;
}

SimDuration RunReport::steady_state_rms() const {
  SimDuration worst;
  for (const auto& n : nodes) {
    if (n.role != "master") worst = std::max(worst, n.steady_state.rms_error);
  }
  return worst;
}

const NodeReport* RunReport::find(std::string_view name) const {
  for (const auto& n : nodes) {
    if (n.name == name) return &n;
  }
  return nullptr;
}

json RunReport::to_json() const {
  json jn = json::array();
  for (const auto& n : nodes) {
    json e{{"name", n.name},
           {"role", n.role},
           {"reference", n.reference},
           {"steady_state", stats_json(n.steady_state)}};
    if (n.session) e["session"] = session_json(*n.session);
    if (n.link) {
      e["fiber"] = {{"asymmetry_ps", fiber_asymmetry(*n.link).count()},
                    {"calibrated_asymmetry_ps", n.link->calibrated_asymmetry.count()}};
    }
    jn.push_back(e);
  }
  return json{{"version", version},
              {"seed", seed},
              {"protocol", std::string(to_string(protocol))},
              {"steady_state_fraction", steady_state_fraction},
              {"scenario", scenario},
              {"nodes", jn},
              {"summary",
               {{"steady_state_max_abs_error_ps", steady_state_max_abs().count()},
                {"steady_state_rms_error_ps", steady_state_rms().count()}}}};
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  const ProtocolConfig& proto = cfg.protocol;
  const bool gnss = proto.kind == ProtocolKind::GNSS;
  spdlog::info("run: {} with {} nodes, seed {}, {} s", to_string(proto.kind), cfg.nodes.size(), cfg.seed,
               proto.duration.seconds());

  const size_t n = cfg.nodes.size();
  std::vector<ClockState> clocks;
  std::vector<Rng> sw_rngs, link_rngs;
  std::vector<ServoState> servos;
  clocks.reserve(n);
  sw_rngs.reserve(n);
  link_rngs.reserve(n);
  servos.reserve(n);
  for (const auto& node : cfg.nodes) {
    clocks.emplace_back(node.model, node.initial_offset, derive_seed(cfg.seed, "osc:" + node.name));
    sw_rngs.push_back(make_stream(cfg.seed, "sw:" + node.name));
  }
  auto index_of = [&](const std::string& name) {
    for (size_t i = 0; i < n; ++i) {
      if (cfg.nodes[i].name == name) return i;
    }
    throw ConfigError("undefined node \"" + name + "\"");
  };
  auto endpoint = [&](size_t i) {
    return Endpoint{&clocks[i], cfg.nodes[i].timestamping, cfg.nodes[i].sw_jitter_hi, &sw_rngs[i]};
  };

  EventQueue queue;
  std::vector<std::unique_ptr<SyncSession>> sessions(n);
  std::vector<std::optional<FiberLink>> used_links(n);
  const size_t master = gnss ? n : index_of(proto.master);

  for (size_t i = 0; i < n; ++i) {
    if (i == master) continue;
    const NodeConfig& node = cfg.nodes[i];
    servos.push_back(attach_servo(node.model, proto.session.servo));
    ServoState* servo = &servos.back();
    if (gnss) {
      GnssSetup setup = proto.gnss;
      if (const LinkConfig* l = cfg.find_link(node.name, kSkyEndpoint)) setup.cable = l->cable;
      link_rngs.push_back(make_stream(cfg.seed, "gnss:" + node.name));
      sessions[i] = std::make_unique<GnssSession>(queue, cfg.environment, proto.session, endpoint(i), setup,
                                                  &link_rngs.back(), servo);
      continue;
    }
    const LinkConfig& l = *cfg.find_link(node.name, proto.master);
    link_rngs.push_back(make_stream(cfg.seed, "link:" + l.from + "-" + l.to));
    Medium medium = oriented_medium(l, node.name, &link_rngs.back());
    switch (proto.kind) {
      case ProtocolKind::NTP_STYLE:
      case ProtocolKind::PTP_HW:
        sessions[i] = std::make_unique<TwoWaySession>(queue, cfg.environment, proto.session, proto.kind,
                                                      endpoint(master), endpoint(i), medium, servo);
        break;
      case ProtocolKind::TWSTT:
        sessions[i] = std::make_unique<TwsttSession>(queue, cfg.environment, proto.session, endpoint(master),
                                                     endpoint(i), medium, servo);
        break;
      case ProtocolKind::ROUND_TRIP:
        sessions[i] = std::make_unique<RoundTripSession>(queue, cfg.environment, proto.session,
                                                         endpoint(master), endpoint(i), medium, servo);
        break;
      case ProtocolKind::WHITE_RABBIT: {
        FiberLink fiber = *medium.fiber;
        if (l.calibrate) {
          fiber = calibrate_link(clocks[master], clocks[i], fiber, clocks[i].offset() - clocks[master].offset(),
                                 proto.session, SimTime::zero(), 16, derive_seed(cfg.seed, "calibrate:" + node.name));
          spdlog::info("calibrated {}: asymmetry {} ps", node.name, fiber.calibrated_asymmetry.count());
        }
        used_links[i] = fiber;
        sessions[i] = std::make_unique<WhiteRabbitSession>(queue, cfg.environment, proto.session,
                                                           endpoint(master), endpoint(i), fiber, servo);
        break;
      }
      case ProtocolKind::GNSS:
        break;
    }
  }

  const SimTime end = proto.first_exchange + proto.duration;
  std::vector<ErrorSeries> series(n, ErrorSeries(cfg.outputs.cadence));
  std::function<void(SimTime)> sample = [&](SimTime t) {
    for (auto& c : clocks) c.advance(t, cfg.environment);
    for (size_t i = 0; i < n; ++i) {
      const SimDuration err =
          (gnss || i == master) ? clocks[i].offset() : clocks[i].offset() - clocks[master].offset();
      series[i].push(t, err);
    }
    if (end - t >= cfg.outputs.cadence) queue.schedule(t + cfg.outputs.cadence, sample);
  };
  queue.schedule(SimTime::zero(), sample);
  for (size_t i = 0; i < n; ++i) {
    if (!sessions[i]) continue;
    sessions[i]->set_observer([name = cfg.nodes[i].name](SimTime t, const SyncEstimate& e) {
      spdlog::debug("{} t={} ps offset={} ps delay={} ps", name, t.ps(), e.offset_delta.count(),
                    e.delay_d.count());
    });
    sessions[i]->start(proto.first_exchange);
  }
  queue.run_until(end);

  RunReport report;
  report.seed = cfg.seed;
  report.protocol = proto.kind;
  report.steady_state_fraction = cfg.outputs.steady_state_fraction;
  report.scenario = cfg.raw;
  for (size_t i = 0; i < n; ++i) {
    NodeReport nr;
    nr.name = cfg.nodes[i].name;
    nr.role = gnss ? "receiver" : (i == master ? "master" : "slave");
    nr.reference = (gnss || i == master) ? "physical" : proto.master;
    const auto tail = series[i].tail(cfg.outputs.steady_state_fraction);
    nr.steady_state = summarize(tail);
    const auto phase = phase_of(tail);
    const auto taus = octave_taus(phase.size(), cfg.outputs.cadence);
    nr.steady_state.adev = allan_deviation(phase, cfg.outputs.cadence, taus);
    if (sessions[i]) nr.session = sessions[i]->stats();
    nr.link = used_links[i];
    nr.series = std::move(series[i]);
    report.nodes.push_back(std::move(nr));
  }
  spdlog::info("done: steady-state max |error| {} ps", report.steady_state_max_abs().count());
  if (out_dir) write_outputs(report, *out_dir);
  return report;
}

void write_outputs(const RunReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& n : report.nodes) {
    const auto path = out_dir / ("series_" + n.name + ".csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    n.series.write_csv(os);
  }
  const auto path = out_dir / "report.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << report.to_json().dump(2) << '\n';
}

std::vector<ComparisonRow> compare_protocols(const std::vector<ScenarioConfig>& configs) {
  if (configs.empty()) throw ConfigError("nothing to compare");
  const ScenarioConfig& first = configs.front();
  auto part = [](const ScenarioConfig& c, const char* key) {
    return c.raw.contains(key) ? c.raw.at(key) : json();
  };
  for (size_t i = 1; i < configs.size(); ++i) {
    const ScenarioConfig& c = configs[i];
    if (c.seed != first.seed) throw ConfigError("config " + std::to_string(i) + " uses a different seed");
    for (const char* key : {"nodes", "links", "environment", "outputs"}) {
      if (part(c, key) != part(first, key)) {
        throw ConfigError("config " + std::to_string(i) + " has a different topology (\"" + key + "\")");
      }
    }
  }

  std::vector<std::future<RunReport>> runs;
  for (const auto& c : configs) {
    runs.push_back(std::async(std::launch::async, [&c] { return run_scenario(c); }));
  }
  std::vector<ComparisonRow> rows;
  for (size_t i = 0; i < runs.size(); ++i) {
    const RunReport r = runs[i].get();
    rows.push_back({i, std::string(to_string(configs[i].protocol.kind)), r.steady_state_max_abs(),
                    r.steady_state_rms()});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    return a.steady_state_max_abs < b.steady_state_max_abs;
  });
  return rows;
}

bool init_logging_from_env() {
  if (!spdlog::get("chronosim")) spdlog::set_default_logger(spdlog::stderr_color_mt("chronosim"));
  spdlog::set_level(spdlog::level::warn);
  const char* v = std::getenv("CHRONOSIM_LOG");
  if (v == nullptr || *v == '\0') return true;
  const auto level = spdlog::level::from_str(v);
  // from_str maps anything unknown to off.
  if (level == spdlog::level::off && std::string_view(v) != "off") return false;
  spdlog::set_level(level);
  return true;
}

}  // namespace chronosim
