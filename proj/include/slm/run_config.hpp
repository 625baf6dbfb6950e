#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slm/ensemble.hpp"
#include "slm/model.hpp"
#include "slm/simulator.hpp"
#include "slm/states.hpp"

namespace slm {

struct MasterSpec {
  std::size_t n_max = 200;
  std::vector<std::size_t> n_max_sweep;
  double rel_tol = 1e-10;
};

struct VerifySpec {
  std::optional<double> beta_star;
  std::optional<double> beta_lower;
  std::vector<int> drift_orders{1, 2, 3};
};

struct DiagnosticsSpec {
  std::uint64_t samples = 100000;
  int bins = 20;
};

/// Fully validated run description; one document drives every subcommand.
struct RunConfig {
  SimParams params;
  InitialState initial;
  StopCondition stop;
  std::uint64_t replicas = 1;
  std::uint64_t seed = 0;
  ObservationSchedule schedule;
  MasterSpec master;
  VerifySpec verify;
  DiagnosticsSpec diagnostics;
  std::string output_dir = "out";
};

/// Parses and validates a JSON run config. Unknown keys, type mismatches and
/// constraint violations raise ConfigError carrying the dotted key path.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace slm
