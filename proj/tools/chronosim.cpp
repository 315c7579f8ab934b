// chronosim command line: run, compare and validate scenarios.
//
// Exit codes: 0 success, 1 invalid configuration or usage, 2 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "chronosim/runner.hpp"
#include "chronosim/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

struct LoadError {
  int code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot open\n";
    throw LoadError{kRuntime};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

chronosim::ScenarioConfig load(const std::string& path, std::optional<uint64_t> seed) {
  auto result = chronosim::validate_config(read_file(path), seed);
  if (!result.ok()) {
    for (const auto& e : result.errors) std::cerr << path << ": " << e << '\n';
    throw LoadError{kInvalid};
  }
  return std::move(*result.config);
}

}  // namespace

int main(int argc, char** argv) {
  if (!chronosim::init_logging_from_env()) {
    std::cerr << "CHRONOSIM_LOG: unknown level, using warn\n";
  }

  CLI::App app{"Clock synchronization simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one scenario");
  std::string run_config, out_dir;
  std::optional<uint64_t> run_seed;
  run->add_option("--config", run_config, "Scenario JSON")->required();
  run->add_option("--seed", run_seed, "Root seed (overrides the file)");
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* compare = app.add_subcommand("compare", "Run scenarios sharing one topology and rank them");
  std::vector<std::string> compare_configs;
  std::optional<uint64_t> compare_seed;
  compare->add_option("--configs", compare_configs, "Scenario JSON files")->required();
  compare->add_option("--seed", compare_seed, "Root seed for every run");

  auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
  std::string validate_config;
  validate->add_option("--config", validate_config, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate) {
      load(validate_config, std::nullopt);
      std::cout << validate_config << ": ok\n";
      return kOk;
    }
    if (*run) {
      const auto cfg = load(run_config, run_seed);
      const auto report = chronosim::run_scenario(cfg, out_dir);
      std::cout << "steady-state max |error|: " << report.steady_state_max_abs().count() << " ps\n";
      return kOk;
    }
    if (*compare) {
      std::vector<chronosim::ScenarioConfig> configs;
      for (const auto& path : compare_configs) configs.push_back(load(path, compare_seed));
      const auto rows = chronosim::compare_protocols(configs);
      std::printf("%-4s %-14s %-40s %22s %22s\n", "rank", "protocol", "config", "max_abs_error_ps",
                  "rms_error_ps");
      for (size_t r = 0; r < rows.size(); ++r) {
        std::printf("%-4zu %-14s %-40s %22lld %22lld\n", r + 1, rows[r].label.c_str(),
                    compare_configs[rows[r].index].c_str(),
                    static_cast<long long>(rows[r].steady_state_max_abs.count()),
                    static_cast<long long>(rows[r].steady_state_rms.count()));
      }
      return kOk;
    }
  } catch (const LoadError& e) {
    return e.code;
  } catch (const chronosim::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const chronosim::RangeError& e) {
    std::cerr << "aborted: value outside the picosecond range: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
