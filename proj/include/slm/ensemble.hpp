#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "slm/estimators.hpp"
#include "slm/model.hpp"
#include "slm/simulator.hpp"

namespace slm {

struct ObservationSchedule {
  std::vector<double> times;   // strictly increasing, >= 0
  std::vector<int> orders;     // raw moment orders n
  std::vector<double> betas;   // exponential moment exponents

  void validate() const;
};

using InitialSampler = std::function<Configuration(RandomStream&)>;

/// Called for every replica at every observation time it reaches. Calls are
/// serialized, but may come from any worker thread and in any replica order.
using ReplicaObserver =
    std::function<void(std::uint64_t replica, std::size_t time_index, const Configuration& config)>;

struct EnsembleOptions {
  std::uint64_t first_replica = 0;
  unsigned threads = 1;
  std::uint64_t population_cap = 1'000'000;
  ReplicaObserver observer;
};

/// Partial ensemble result. merge() is exactly commutative and associative.
struct EnsembleAccumulator {
  std::vector<CountHistogram> counts;  // one per observation time
  std::uint64_t replicas = 0;
  /// Replicas stopped by the population cap; they contribute no observations
  /// at or after the time they were capped.
  std::uint64_t truncated = 0;
  RunStatistics stats;

  void merge(const EnsembleAccumulator& other);
  friend bool operator==(const EnsembleAccumulator&, const EnsembleAccumulator&) = default;
};

/// Runs replicas [first_replica, first_replica + replicas). Replica r uses
/// RandomStream::for_replica(base_seed, r) to draw its initial state and then
/// its dynamics, so results do not depend on the thread count.
EnsembleAccumulator run_ensemble(const SimParams& params, const InitialSampler& initial, std::uint64_t replicas,
                                 std::uint64_t base_seed, const ObservationSchedule& schedule,
                                 const EnsembleOptions& options = {});

MomentReport make_report(const EnsembleAccumulator& acc, const ObservationSchedule& schedule);

}  // namespace slm
