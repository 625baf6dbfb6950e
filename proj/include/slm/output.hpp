#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "slm/estimators.hpp"
#include "slm/master_equation.hpp"
#include "slm/simulator.hpp"

namespace slm {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, int dimension);
void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot, int dimension);
void write_moment_csv(std::ostream& out, const MomentReport& report);

struct TimedDistribution {
  double time = 0.0;
  CountDistribution dist;
};
void write_distribution_csv(std::ostream& out, const std::vector<TimedDistribution>& series);

struct LabelledSweep {
  double beta = 0.0;
  SweepResult result;
};
void write_sweep_csv(std::ostream& out, const std::vector<LabelledSweep>& sweeps);

/// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace slm
