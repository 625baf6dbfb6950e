#include <boost/math/distributions/binomial.hpp>
#include <cmath>

#include "doctest.h"
#include "slm/errors.hpp"
#include "slm/simulator.hpp"
#include "slm/states.hpp"
#include "slm/stats.hpp"
#include "support.hpp"

using namespace slm;
using slm::testing::contact_1d;

namespace {

Configuration fixed_start(const SimParams& p, std::uint64_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample_initial(InitialState::fixed(n), p, rng);
}

}  // namespace

TEST_CASE("pure death counts are binomial") {
  SimParams p = contact_1d(10.0, 1.0, 0.0);
  p.dispersal = Kernel::zero(1);
  const std::uint64_t n0 = 30;
  const double t = 1.0;
  std::vector<double> observed(n0 + 1, 0.0);
  StopCondition stop;
  stop.t_end = t;
  const int reps = 5000;
  for (int r = 0; r < reps; ++r) {
    RandomStream rng = RandomStream::for_replica(77, static_cast<std::uint64_t>(r));
    Configuration init = sample_initial(InitialState::fixed(n0), p, rng);
    const Trajectory traj = run(p, std::move(init), stop, rng);
    observed[traj.count_at(t)] += 1.0;
  }
  boost::math::binomial_distribution<double> law(static_cast<double>(n0), std::exp(-t));
  std::vector<double> probs(n0 + 1);
  for (std::uint64_t k = 0; k <= n0; ++k) probs[k] = boost::math::pdf(law, static_cast<double>(k));
  CHECK(stats::chi_square_test(observed, probs).p_value > 1e-3);
}

TEST_CASE("first event kind follows the rate split") {
  // Two points 0.5 apart: each dies at 0.5 + 1.0, each reproduces at 1.0.
  SimParams p = contact_1d(10.0, 0.5, 1.0);
  p.competition = Kernel::tophat(1, 1.0, 1.0);
  int births = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    Configuration c = p.empty_configuration();
    const double a[] = {2.0}, b[] = {2.5};
    c.insert(a);
    c.insert(b);
    Simulator sim(p, std::move(c), RandomStream::for_replica(5, static_cast<std::uint64_t>(i)));
    if (sim.step().kind == EventKind::birth) ++births;
  }
  const double expected = 2.0 / 5.0;
  const double se = std::sqrt(expected * (1 - expected) / trials);
  CHECK(std::abs(births / double(trials) - expected) < 4.0 * se);
}

TEST_CASE("offspring land within dispersal range of a point") {
  SimParams p = contact_1d(10.0, 0.2, 1.0, 0.5);
  Simulator sim(p, fixed_start(p, 10, 1), RandomStream(2));
  for (int i = 0; i < 2000 && !sim.configuration().empty(); ++i) {
    std::vector<std::vector<double>> before;
    for (Handle h : sim.configuration().handles()) {
      auto x = sim.configuration().position(h);
      before.emplace_back(x.begin(), x.end());
    }
    const Event e = sim.step();
    if (e.kind != EventKind::birth) continue;
    double nearest = 1e9;
    for (const auto& x : before) nearest = std::min(nearest, p.domain.distance(x, e.location));
    REQUIRE(nearest <= 0.5 + 1e-12);
    REQUIRE(sim.configuration().valid(e.handle));
  }
}

TEST_CASE("peeking at the next event time does not consume randomness") {
  SimParams p = contact_1d(10.0, 1.0, 0.8);
  Simulator a(p, fixed_start(p, 15, 3), RandomStream(4));
  Simulator b(p, fixed_start(p, 15, 3), RandomStream(4));
  for (int i = 0; i < 500; ++i) {
    const double t1 = a.next_event_time();
    CHECK(a.next_event_time() == t1);
    const Event ea = a.step();
    const Event eb = b.step();
    REQUIRE(ea.kind == eb.kind);
    REQUIRE(a.time() == b.time());
    if (ea.kind == EventKind::absorbed) break;
  }
}

TEST_CASE("empty configuration is absorbing") {
  SimParams p = contact_1d(10.0, 1.0, 0.8);
  Simulator sim(p, p.empty_configuration(), RandomStream(1));
  CHECK(std::isinf(sim.next_event_time()));
  const Event e = sim.step();
  CHECK(e.kind == EventKind::absorbed);
  CHECK(sim.time() == 0.0);
}

TEST_CASE("trajectories are a function of the seed and independent of snapshots") {
  SimParams p = testing::local_competition_2d(8.0, 0.5, 1.5, 0.2, 1.0);
  StopCondition stop;
  stop.t_end = 3.0;
  RandomStream r1(9), r2(9);
  Configuration c1 = sample_initial(InitialState::poisson(0.5), p, r1);
  Configuration c2 = sample_initial(InitialState::poisson(0.5), p, r2);
  const double times[] = {0.5, 1.0, 2.5};
  const Trajectory a = run(p, std::move(c1), stop, r1);
  const Trajectory b = run(p, std::move(c2), stop, r2, times);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].location == b.events[i].location);
  }
  CHECK(b.snapshots.size() == 3);
  for (const auto& s : b.snapshots) CHECK(s.points.size() == b.count_at(s.time));
}

TEST_CASE("stop reasons") {
  SimParams p = contact_1d(10.0, 1.0, 0.0);
  p.dispersal = Kernel::zero(1);

  SUBCASE("extinction wins over time") {
    StopCondition stop;
    stop.t_end = 1e6;
    RandomStream rng(1);
    const Trajectory t = run(p, fixed_start(p, 5, 1), stop, rng);
    CHECK(t.reason == StopReason::extinction);
    CHECK(t.count_at(t.end_time) == 0);
  }
  SUBCASE("empty start with zero event budget is extinction") {
    StopCondition stop;
    stop.max_events = 0;
    RandomStream rng(1);
    CHECK(run(p, p.empty_configuration(), stop, rng).reason == StopReason::extinction);
  }
  SUBCASE("event budget") {
    StopCondition stop;
    stop.max_events = 3;
    RandomStream rng(1);
    const Trajectory t = run(p, fixed_start(p, 20, 1), stop, rng);
    CHECK(t.reason == StopReason::event_count);
    CHECK(t.events.size() == 3);
  }
  SUBCASE("time") {
    StopCondition stop;
    stop.t_end = 0.01;
    RandomStream rng(1);
    const Trajectory t = run(p, fixed_start(p, 20, 1), stop, rng);
    CHECK(t.reason == StopReason::time);
    CHECK(t.end_time == 0.01);
  }
  SUBCASE("population cap") {
    SimParams grow = contact_1d(10.0, 0.0, 5.0);
    StopCondition stop;
    stop.t_end = 100.0;
    stop.population_cap = 50;
    RandomStream rng(1);
    const Trajectory t = run(grow, fixed_start(grow, 5, 1), stop, rng);
    CHECK(t.reason == StopReason::population_cap);
    CHECK(t.truncated);
    CHECK(t.events.back().count == 50);
  }
}

TEST_CASE("drift control refreshes on schedule without tripping") {
  SimParams p = testing::local_competition_2d(6.0, 0.2, 1.0, 0.05, 1.5);
  p.competition = Kernel::gaussian(2, 0.3, 0.25, 2.0);
  RandomStream rng(8);
  Simulator sim(p, sample_initial(InitialState::poisson(1.5), p, rng), RandomStream(8));
  for (std::uint64_t i = 0; i < 2 * Simulator::kRefreshInterval + 10; ++i) REQUIRE(sim.step().kind != EventKind::absorbed);
  CHECK(sim.statistics().drift_refreshes == 2);
  CHECK(sim.statistics().max_drift < 1e-9);
  const auto& c = sim.configuration();
  CHECK(c.total_competition() == doctest::Approx(c.brute_force_total_competition()).epsilon(1e-9));
}

TEST_CASE("unresolvable offspring coincidence raises") {
  // Displacements below half an ulp of the parent coordinate round to zero.
  SimParams p;
  p.domain = Domain::torus(1, 0x1p21);
  p.mortality = 0.0;
  p.dispersal = Kernel::tophat(1, 1.0, 0x1p-40);
  p.competition = Kernel::zero(1);
  Configuration c = p.empty_configuration();
  const double x[] = {0x1p20};
  c.insert(x);
  Simulator sim(p, std::move(c), RandomStream(1));
  CHECK_THROWS_AS(sim.step(), CoincidenceError);
}

TEST_CASE("event statistics add up") {
  SimParams p = contact_1d(10.0, 1.0, 0.9);
  StopCondition stop;
  stop.t_end = 5.0;
  RandomStream rng(3);
  const Trajectory t = run(p, fixed_start(p, 20, 3), stop, rng);
  CHECK(t.stats.events == t.stats.births + t.stats.deaths);
  CHECK(t.stats.events == t.events.size());
  CHECK(t.initial_count + t.stats.births - t.stats.deaths == t.count_at(t.end_time));
}
