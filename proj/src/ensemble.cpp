#include "slm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "slm/errors.hpp"

namespace slm {

void ObservationSchedule::validate() const {
  if (times.empty()) throw ConfigError("observables.times", "at least one observation time is required");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw ConfigError("observables.times", "must be finite and >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw ConfigError("observables.times", "must be strictly increasing");
  }
  for (int n : orders)
    if (n < 0) throw ConfigError("observables.orders", "moment orders must be >= 0");
  for (double b : betas)
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("observables.betas", "exponents must be >= 0");
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
  if (counts.size() < other.counts.size()) counts.resize(other.counts.size());
  for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i].merge(other.counts[i]);
  replicas += other.replicas;
  truncated += other.truncated;
  stats.merge(other.stats);
}

namespace {

void run_replica(const SimParams& params, const InitialSampler& initial, std::uint64_t replica,
                 std::uint64_t base_seed, const ObservationSchedule& schedule, const EnsembleOptions& options,
                 std::mutex& observer_mutex, EnsembleAccumulator& acc) {
  RandomStream rng = RandomStream::for_replica(base_seed, replica);
  Configuration start = initial(rng);
  Simulator sim(params, std::move(start), std::move(rng));
  ++acc.replicas;
  for (std::size_t k = 0; k < schedule.times.size(); ++k) {
    const double t = schedule.times[k];
    bool capped = false;
    while (sim.next_event_time() <= t) {
      sim.step();
      if (sim.configuration().size() >= options.population_cap) {
        capped = true;
        break;
      }
    }
    if (capped) {
      ++acc.truncated;
      break;
    }
    acc.counts[k].add(sim.configuration().size());
    if (options.observer) {
      std::lock_guard lock(observer_mutex);
      options.observer(replica, k, sim.configuration());
    }
  }
  acc.stats.merge(sim.statistics());
}

}  // namespace

EnsembleAccumulator run_ensemble(const SimParams& params, const InitialSampler& initial, std::uint64_t replicas,
                                 std::uint64_t base_seed, const ObservationSchedule& schedule,
                                 const EnsembleOptions& options) {
  if (replicas == 0) throw ConfigError("replicas", "must be >= 1");
  schedule.validate();
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(replicas)));

  std::vector<EnsembleAccumulator> partial(threads);
  for (auto& p : partial) p.counts.resize(schedule.times.size());
  std::vector<std::exception_ptr> errors(threads);
  std::mutex observer_mutex;

  auto work = [&](unsigned w) {
    const std::uint64_t begin = replicas * w / threads;
    const std::uint64_t end = replicas * (w + 1) / threads;
    try {
      for (std::uint64_t r = begin; r < end; ++r)
        run_replica(params, initial, options.first_replica + r, base_seed, schedule, options, observer_mutex,
                    partial[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  EnsembleAccumulator total;
  total.counts.resize(schedule.times.size());
  for (const auto& p : partial) total.merge(p);
  return total;
}

MomentReport make_report(const EnsembleAccumulator& acc, const ObservationSchedule& schedule) {
  MomentReport report;
  for (std::size_t k = 0; k < schedule.times.size() && k < acc.counts.size(); ++k) {
    const CountHistogram& h = acc.counts[k];
    const double t = schedule.times[k];
    for (int n : schedule.orders)
      report.rows.push_back({t, "raw_moment", static_cast<double>(n), h.raw_moment(n), h.total()});
    for (double b : schedule.betas) report.rows.push_back({t, "exp_moment", b, h.exp_moment(b), h.total()});
    report.rows.push_back({t, "extinction", 0.0, h.extinction(), h.total()});
  }
  return report;
}

}  // namespace slm
