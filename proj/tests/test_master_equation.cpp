#include <boost/math/distributions/binomial.hpp>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "slm/errors.hpp"
#include "slm/master_equation.hpp"
#include "support.hpp"

using namespace slm;

namespace {

CountDistribution point_mass(std::size_t n0, std::size_t n_max) {
  CountDistribution d;
  d.p.assign(n_max + 1, 0.0);
  d.p[n0] = 1.0;
  return d;
}

CountRates linear(double plus, double m, double kappa = 0.0) {
  CountRates r;
  r.plus_mass = plus;
  r.mortality = m;
  r.kappa = kappa;
  return r;
}

}  // namespace

TEST_CASE("pure death matches binomial thinning") {
  const double times[] = {0.1, 1.0, 3.0};
  const auto sol = evolve(point_mass(30, 64), linear(0.0, 1.0), times, 64);
  REQUIRE(sol.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    boost::math::binomial_distribution<double> law(30.0, std::exp(-times[i]));
    double sup = 0.0;
    for (std::size_t n = 0; n <= 64; ++n) {
      const double exact = n <= 30 ? boost::math::pdf(law, static_cast<double>(n)) : 0.0;
      sup = std::max(sup, std::abs(sol[i].p[n] - exact));
    }
    CHECK(sup <= 1e-8);
    CHECK(sol[i].leaked == 0.0);
  }
}

TEST_CASE("linear birth-death mean and generating function") {
  const auto rates = linear(0.5, 1.0);
  const double times[] = {0.5, 1.0, 2.0};
  const auto sol = evolve(point_mass(20, 150), rates, times, 150);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(sol[i].mean() == doctest::Approx(20.0 * std::exp(-0.5 * times[i])).epsilon(1e-9));
    const double s = 0.7;
    double pgf = 0.0;
    for (std::size_t n = 0; n < sol[i].p.size(); ++n) pgf += sol[i].p[n] * std::pow(s, static_cast<double>(n));
    CHECK(pgf == doctest::Approx(std::pow(testing::linear_bd_pgf(0.5, 1.0, s, times[i]), 20)).epsilon(1e-9));
  }
}

TEST_CASE("Yule process from one individual is geometric") {
  const double times[] = {0.7};
  EvolveOptions loose;
  loose.check_leak = false;
  const auto sol = evolve(point_mass(1, 120), linear(1.0, 0.0), times, 120, loose).front();
  const double e = std::exp(-0.7);
  for (std::size_t n = 1; n < 30; ++n)
    CHECK(sol.p[n] == doctest::Approx(e * std::pow(1.0 - e, static_cast<double>(n - 1))).epsilon(1e-8));
  CHECK(sol.total_mass() + sol.leaked == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.leaked == doctest::Approx(std::pow(1.0 - e, 120.0)).epsilon(1e-6));
}

TEST_CASE("mass is conserved including the leak") {
  const auto rates = linear(2.0, 0.5, 0.01);
  const double times[] = {0.1, 0.5, 1.0, 4.0};
  EvolveOptions o;
  o.check_leak = false;
  for (const auto& d : evolve(point_mass(10, 80), rates, times, 80, o))
    CHECK(std::abs(d.total_mass() + d.leaked - 1.0) <= 1e-10);
}

TEST_CASE("mean-field moment identity") {
  // d/dt E n = (<a+> - m) E n - kappa E n(n - 1).
  const auto rates = linear(1.0, 0.5, 0.05);
  const double h = 1e-4;
  const double times[] = {1.0 - h, 1.0, 1.0 + h};
  const auto sol = evolve(point_mass(20, 200), rates, times, 200);
  const double derivative = (sol[2].mean() - sol[0].mean()) / (2 * h);
  const double rhs = 0.5 * sol[1].mean() - 0.05 * sol[1].factorial_moment2();
  CHECK(derivative == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("output times are hit exactly, including zero and repeats") {
  const double times[] = {0.0, 0.0, 0.25};
  const auto sol = evolve(point_mass(5, 20), linear(0.0, 1.0), times, 20);
  CHECK(sol[0].p[5] == 1.0);
  CHECK(sol[1].p[5] == 1.0);
  boost::math::binomial_distribution<double> law(5.0, std::exp(-0.25));
  CHECK(sol[2].p[5] == doctest::Approx(boost::math::pdf(law, 5.0)).epsilon(1e-9));
}

TEST_CASE("truncation errors") {
  const double times[] = {1.0};
  CHECK_THROWS_AS(evolve(point_mass(30, 40), linear(0.0, 1.0), times, 20), TruncationError);
  CHECK_THROWS_AS(evolve(point_mass(1, 10), linear(3.0, 0.0), times, 10), TruncationError);
  EvolveOptions off;
  off.check_leak = false;
  CHECK_NOTHROW(evolve(point_mass(1, 10), linear(3.0, 0.0), times, 10, off));
  CountDistribution bad = point_mass(1, 10);
  bad.p[2] = 0.1;
  CHECK_THROWS_AS(evolve(bad, linear(1.0, 1.0), times, 10), DomainError);
  const double backwards[] = {1.0, 0.5};
  CHECK_THROWS_AS(evolve(point_mass(1, 10), linear(1.0, 1.0), backwards, 10), DomainError);
}

TEST_CASE("count rates need a count-determined competition") {
  const auto contact = testing::contact_1d(10.0, 1.0, 0.5);
  const auto r = build_count_rates(contact);
  CHECK(r.kappa == 0.0);
  CHECK(r.birth(4) == 2.0);
  CHECK(r.death(4) == 4.0);
  CHECK(build_count_rates(testing::mean_field_1d(10.0, 1.0, 0.5, 0.05)).kappa == 0.05);
  CHECK(build_count_rates(testing::mean_field_1d(10.0, 1.0, 0.5, 0.05)).death(3) == doctest::Approx(3.0 + 0.3));
  auto local = testing::contact_1d(10.0, 1.0, 0.5);
  local.competition = Kernel::tophat(1, 0.1, 2.0);
  CHECK_THROWS_AS(build_count_rates(local), NotCountDetermined);
  auto smooth = testing::contact_1d(10.0, 1.0, 0.5);
  smooth.competition = Kernel::gaussian(1, 0.1, 0.5, 5.0);
  CHECK_THROWS_AS(build_count_rates(smooth), NotCountDetermined);
  auto free = testing::contact_1d(10.0, 1.0, 0.5);
  free.domain = Domain::free_space(1);
  free.competition = Kernel::tophat(1, 0.1, 1.0);
  CHECK_THROWS_AS(build_count_rates(free), NotCountDetermined);
}

TEST_CASE("tilted exponential moment matches the closed form") {
  const auto rates = linear(1.0, 2.0);
  const double beta = 0.6;
  for (double t : {1.0, 5.0}) {
    const auto m = tilted_exp_moment(point_mass(3, 200), rates, beta, t, 200);
    CHECK(m.value == doctest::Approx(std::pow(testing::linear_bd_pgf(1.0, 2.0, std::exp(beta), t), 3)).epsilon(1e-9));
  }
  // With beta = 0 the tilted chain is the plain one.
  const double times[] = {2.0};
  const auto d = evolve(point_mass(3, 50), rates, times, 50).front();
  CHECK(tilted_exp_moment(point_mass(3, 50), rates, 0.0, 2.0, 50).value == doctest::Approx(d.total_mass()).epsilon(1e-12));
}

TEST_CASE("truncation sweeps") {
  const std::size_t levels[] = {50, 100, 200};
  auto geo = [](std::size_t n_max) {
    CountDistribution d;
    const double q = std::exp(-1.0);
    for (std::size_t k = 0; k <= n_max; ++k) d.p.push_back((1 - q) * std::pow(q, static_cast<double>(k)));
    d.leaked = std::pow(q, static_cast<double>(n_max + 1));
    return d;
  };
  const auto yule = linear(1.0, 0.0);
  const auto early = truncation_sweep(geo, yule, 0.1, 0.5, levels);
  CHECK(early.verdict == SweepVerdict::converged);
  CHECK(early.rows.back().value ==
        doctest::Approx(testing::geometric_start_exp_moment(1.0, 0.0, std::exp(-1.0), 0.5, 0.1)).epsilon(1e-9));
  CHECK(truncation_sweep(geo, yule, 1.0, 0.5, levels).verdict == SweepVerdict::diverging);
  CHECK(early.rows.size() == 3);
  CHECK(early.rows.front().relative_change == 0.0);

  const std::size_t bad[] = {100, 100};
  CHECK_THROWS_AS(truncation_sweep(geo, yule, 0.1, 0.5, bad), DomainError);
  CHECK_THROWS_AS(truncation_sweep(geo, yule, 0.1, 0.5, std::span<const std::size_t>{}), DomainError);

  const auto mean_sweep = sweep_observable(geo, yule, 0.5, levels, [](const CountDistribution& d) { return d.mean(); });
  CHECK(mean_sweep.verdict == SweepVerdict::converged);
}

TEST_CASE("exponential moment of a distribution") {
  CountDistribution d;
  d.p = {0.5, 0.25, 0.25};
  CHECK(exp_moment(d, 0.0) == doctest::Approx(1.0));
  CHECK(exp_moment(d, 1.0) == doctest::Approx(0.5 + 0.25 * std::exp(1.0) + 0.25 * std::exp(2.0)));
  CHECK(d.raw_moment(2) == doctest::Approx(0.25 + 1.0));
  CHECK(d.n_max() == 2);
}
