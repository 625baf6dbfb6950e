#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "slm/configuration.hpp"
#include "slm/model.hpp"
#include "slm/random.hpp"

namespace slm {

enum class EventKind { death, birth, absorbed };
std::string_view to_string(EventKind kind);

struct Event {
  EventKind kind = EventKind::absorbed;
  /// Waiting time before the event; 0 for `absorbed`.
  double dt = 0.0;
  /// Removed point (death) or the newborn (birth); stale after a death.
  Handle handle;
  std::vector<double> location;
};

struct RunStatistics {
  std::uint64_t events = 0;
  std::uint64_t births = 0;
  std::uint64_t deaths = 0;
  /// Offspring locations that hit an existing point and were redrawn.
  std::uint64_t coincidence_resamples = 0;
  std::uint64_t drift_refreshes = 0;
  double max_drift = 0.0;

  void merge(const RunStatistics& other);
  friend bool operator==(const RunStatistics&, const RunStatistics&) = default;
};

/// Exact direct-method realization of the birth-death jump process.
///
/// From a configuration gamma the process waits an Exponential(Xi) time,
/// Xi = m|gamma| + E(gamma) + <a+>|gamma|, then either kills x with rate
/// m + E(x, gamma \ x) or places an offspring of a uniformly chosen parent at
/// parent + displacement ~ a+ / <a+>.
///
/// The waiting time of the next event is drawn once and kept until the event
/// is applied, so observing the state at intermediate times never perturbs
/// the random stream.
class Simulator {
 public:
  static constexpr std::uint64_t kRefreshInterval = std::uint64_t{1} << 16;
  static constexpr double kDriftTolerance = 1e-6;
  static constexpr int kMaxCoincidenceRetries = 100;

  Simulator(SimParams params, Configuration initial, RandomStream rng);

  double time() const { return time_; }
  /// Absolute time of the next event; +infinity when the total rate is zero.
  double next_event_time();
  /// Applies the next event and advances the clock to it. Returns `absorbed`
  /// without advancing time when no event can occur.
  Event step();

  const Configuration& configuration() const { return config_; }
  const SimParams& params() const { return params_; }
  const RunStatistics& statistics() const { return stats_; }

 private:
  Handle choose_victim();
  void check_drift();

  SimParams params_;
  Configuration config_;
  RandomStream rng_;
  double time_ = 0.0;
  std::optional<double> pending_;
  RunStatistics stats_;
  std::uint64_t since_refresh_ = 0;
};

struct StopCondition {
  std::optional<double> t_end;
  std::optional<std::uint64_t> max_events;
  std::uint64_t population_cap = 1'000'000;
};

/// Why a run ended; on simultaneous triggers the earlier enumerator wins.
enum class StopReason { extinction, time, event_count, population_cap };
std::string_view to_string(StopReason reason);

struct TrajectoryEntry {
  std::uint64_t index = 0;
  double time = 0.0;
  EventKind kind = EventKind::absorbed;
  std::size_t count = 0;
  std::vector<double> location;
};

struct SnapshotPoint {
  std::uint32_t id = 0;
  std::vector<double> x;
};

struct Snapshot {
  double time = 0.0;
  std::vector<SnapshotPoint> points;  // ordered by id
};

Snapshot take_snapshot(const Configuration& config, double time);

struct Trajectory {
  std::size_t initial_count = 0;
  std::vector<TrajectoryEntry> events;
  std::vector<Snapshot> snapshots;
  StopReason reason = StopReason::time;
  /// Set when the population cap stopped the run.
  bool truncated = false;
  double end_time = 0.0;
  RunStatistics stats;

  /// |gamma_t| for 0 <= t <= end_time.
  std::size_t count_at(double t) const;
};

/// Runs one replica until the first stop condition triggers. Snapshots are
/// taken at the requested times that fall inside the run.
Trajectory run(const SimParams& params, Configuration initial, const StopCondition& stop, RandomStream rng,
               std::span<const double> snapshot_times = {});

}  // namespace slm
