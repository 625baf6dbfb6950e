#include "slm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slm/errors.hpp"

namespace slm {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::death: return "death";
    case EventKind::birth: return "birth";
    case EventKind::absorbed: return "absorbed";
  }
  return "unknown";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::extinction: return "extinction";
    case StopReason::time: return "time";
    case StopReason::event_count: return "event_count";
    case StopReason::population_cap: return "population_cap";
  }
  return "unknown";
}

void RunStatistics::merge(const RunStatistics& other) {
  events += other.events;
  births += other.births;
  deaths += other.deaths;
  coincidence_resamples += other.coincidence_resamples;
  drift_refreshes += other.drift_refreshes;
  max_drift = std::max(max_drift, other.max_drift);
}

Simulator::Simulator(SimParams params, Configuration initial, RandomStream rng)
    : params_(std::move(params)), config_(std::move(initial)), rng_(std::move(rng)) {}

double Simulator::next_event_time() {
  if (!pending_) {
    const double rate = config_.total_rate(params_.mortality, params_.plus_mass());
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    pending_ = time_ + rng_.exponential(rate);
  }
  return *pending_;
}

Handle Simulator::choose_victim() {
  const auto live = config_.handles();
  if (config_.total_competition() == 0.0) return live[rng_.index(live.size())];
  const double m = params_.mortality;
  const double death_rate = m * static_cast<double>(live.size()) + config_.total_competition();
  const double target = rng_.uniform() * death_rate;
  double acc = 0.0;
  for (const Handle& h : live) {
    acc += m + std::max(0.0, config_.competition_at(h));
    if (target < acc) return h;
  }
  // Rounding in the cached total can leave target just above the scanned sum.
  for (auto it = live.rbegin(); it != live.rend(); ++it)
    if (m + config_.competition_at(*it) > 0.0) return *it;
  return live.back();
}

Event Simulator::step() {
  const double t_next = next_event_time();
  Event ev;
  if (!std::isfinite(t_next)) return ev;

  ev.dt = t_next - time_;
  time_ = t_next;
  pending_.reset();

  const double n = static_cast<double>(config_.size());
  const double death_rate = params_.mortality * n + config_.total_competition();
  const double birth_rate = params_.plus_mass() * n;
  if (rng_.uniform() * (death_rate + birth_rate) < death_rate) {
    ev.kind = EventKind::death;
    ev.handle = choose_victim();
    const auto pos = config_.position(ev.handle);
    ev.location.assign(pos.begin(), pos.end());
    config_.remove(ev.handle);
    ++stats_.deaths;
  } else {
    ev.kind = EventKind::birth;
    const auto live = config_.handles();
    const Handle parent = live[rng_.index(live.size())];
    const auto parent_pos = config_.position(parent);
    std::vector<double> child(parent_pos.begin(), parent_pos.end());
    std::vector<double> disp(child.size());
    bool placed = false;
    for (int attempt = 0; attempt <= kMaxCoincidenceRetries; ++attempt) {
      params_.dispersal.sample_displacement(rng_, disp);
      const auto base = config_.position(parent);
      for (std::size_t i = 0; i < child.size(); ++i) child[i] = base[i] + disp[i];
      params_.domain.wrap(child);
      if (!config_.contains_point(child)) {
        placed = true;
        break;
      }
      ++stats_.coincidence_resamples;
    }
    if (!placed)
      throw CoincidenceError("offspring location coincided with an existing point " +
                             std::to_string(kMaxCoincidenceRetries + 1) + " times");
    ev.handle = config_.insert(child);
    ev.location = std::move(child);
    ++stats_.births;
  }
  ++stats_.events;
  if (++since_refresh_ >= kRefreshInterval) check_drift();
  return ev;
}

void Simulator::check_drift() {
  since_refresh_ = 0;
  const DriftReport report = config_.refresh();
  ++stats_.drift_refreshes;
  stats_.max_drift = std::max(stats_.max_drift, report.total_deviation);
  if (report.total_deviation > kDriftTolerance)
    throw NumericalDriftError("cached competition total " + std::to_string(report.total_cached) +
                              " drifted from recomputed " + std::to_string(report.total_fresh));
}

Snapshot take_snapshot(const Configuration& config, double time) {
  Snapshot snap;
  snap.time = time;
  for (const Handle& h : config.sorted_handles()) {
    const auto pos = config.position(h);
    snap.points.push_back({h.slot, std::vector<double>(pos.begin(), pos.end())});
  }
  return snap;
}

std::size_t Trajectory::count_at(double t) const {
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double value, const TrajectoryEntry& e) { return value < e.time; });
  if (it == events.begin()) return initial_count;
  return std::prev(it)->count;
}

Trajectory run(const SimParams& params, Configuration initial, const StopCondition& stop, RandomStream rng,
               std::span<const double> snapshot_times) {
  std::vector<double> times(snapshot_times.begin(), snapshot_times.end());
  std::sort(times.begin(), times.end());
  std::size_t next_snapshot = 0;

  Trajectory tr;
  tr.initial_count = initial.size();
  Simulator sim(params, std::move(initial), std::move(rng));

  auto snapshots_before = [&](double limit, bool inclusive) {
    while (next_snapshot < times.size() &&
           (times[next_snapshot] < limit || (inclusive && times[next_snapshot] == limit))) {
      tr.snapshots.push_back(take_snapshot(sim.configuration(), times[next_snapshot]));
      ++next_snapshot;
    }
  };

  for (;;) {
    const Configuration& config = sim.configuration();
    if (config.empty()) {
      tr.reason = StopReason::extinction;
      tr.end_time = stop.t_end ? std::max(*stop.t_end, sim.time()) : sim.time();
      // The empty configuration is absorbing: every later snapshot is empty.
      snapshots_before(stop.t_end ? tr.end_time : std::numeric_limits<double>::infinity(), true);
      break;
    }
    if (stop.t_end && sim.time() >= *stop.t_end) {
      tr.reason = StopReason::time;
      tr.end_time = sim.time();
      snapshots_before(tr.end_time, true);
      break;
    }
    if (stop.max_events && sim.statistics().events >= *stop.max_events) {
      tr.reason = StopReason::event_count;
      tr.end_time = sim.time();
      snapshots_before(tr.end_time, true);
      break;
    }
    if (config.size() >= stop.population_cap) {
      tr.reason = StopReason::population_cap;
      tr.truncated = true;
      tr.end_time = sim.time();
      snapshots_before(tr.end_time, true);
      break;
    }

    const double t_next = sim.next_event_time();
    if (stop.t_end && t_next > *stop.t_end) {
      tr.reason = StopReason::time;
      tr.end_time = *stop.t_end;
      snapshots_before(tr.end_time, true);
      break;
    }
    if (!std::isfinite(t_next)) {
      // Nonempty but frozen (all rates zero): nothing will ever happen.
      tr.reason = StopReason::time;
      tr.end_time = sim.time();
      snapshots_before(std::numeric_limits<double>::infinity(), true);
      break;
    }
    snapshots_before(t_next, false);
    Event ev = sim.step();
    tr.events.push_back(
        {sim.statistics().events, sim.time(), ev.kind, sim.configuration().size(), std::move(ev.location)});
  }
  tr.stats = sim.statistics();
  return tr;
}

}  // namespace slm
