#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "slm/configuration.hpp"
#include "slm/errors.hpp"
#include "slm/random.hpp"

using slm::Configuration;
using slm::Domain;
using slm::Handle;
using slm::Kernel;

namespace {

void check_against_brute_force(const Configuration& c) {
  for (Handle h : c.handles()) {
    const double brute = c.brute_force_competition_at(h);
    CHECK(c.competition_at(h) == doctest::Approx(brute).epsilon(1e-12).scale(1.0));
    CHECK(c.compute_competition_at(h) == doctest::Approx(brute).epsilon(1e-12).scale(1.0));
  }
  CHECK(c.total_competition() == doctest::Approx(c.brute_force_total_competition()).epsilon(1e-12).scale(1.0));
  CHECK(c.index_consistent());
}

std::vector<double> random_point(slm::RandomStream& rng, int d, double side) {
  std::vector<double> x(static_cast<std::size_t>(d));
  for (auto& c : x) c = rng.uniform(0.0, side);
  return x;
}

}  // namespace

TEST_CASE("insert and remove keep competition caches exact") {
  slm::RandomStream rng(21);
  for (int d = 1; d <= 3; ++d) {
    CAPTURE(d);
    const double side = 6.0;
    Configuration c(Domain::torus(d, side), Kernel::tophat(d, 0.4, 1.5), 1.5);
    std::vector<Handle> hs;
    for (int i = 0; i < 150; ++i) hs.push_back(c.insert(random_point(rng, d, side)));
    check_against_brute_force(c);
    for (int i = 0; i < 80; ++i) {
      const auto k = rng.index(hs.size());
      c.remove(hs[k]);
      hs.erase(hs.begin() + static_cast<std::ptrdiff_t>(k));
    }
    check_against_brute_force(c);
    CHECK(c.size() == 70);
  }
}

TEST_CASE("smooth kernels agree with brute force across the periodic boundary") {
  slm::RandomStream rng(22);
  Configuration c(Domain::torus(2, 8.0), Kernel::gaussian(2, 1.0, 0.25, 2.0), 2.0);
  for (int i = 0; i < 200; ++i) c.insert(random_point(rng, 2, 8.0));
  check_against_brute_force(c);
}

TEST_CASE("range covering the torus gives mean-field sums") {
  Configuration c(Domain::torus(1, 10.0), Kernel::tophat(1, 0.05, 5.0), 10.0);
  slm::RandomStream rng(23);
  for (int i = 0; i < 40; ++i) c.insert(random_point(rng, 1, 10.0));
  for (Handle h : c.handles()) CHECK(c.competition_at(h) == doctest::Approx(0.05 * 39));
  CHECK(c.total_competition() == doctest::Approx(0.05 * 40 * 39));
  check_against_brute_force(c);
}

TEST_CASE("competition resets to exact zero when neighbours leave") {
  Configuration c(Domain::torus(1, 10.0), Kernel::tophat(1, 0.1, 1.0), 1.0);
  const double a[] = {1.0}, b[] = {1.3}, far[] = {5.0};
  const Handle ha = c.insert(a);
  const Handle hb = c.insert(b);
  const Handle hf = c.insert(far);
  CHECK(c.competition_at(ha) == doctest::Approx(0.1));
  c.remove(hb);
  CHECK(c.competition_at(ha) == 0.0);
  CHECK(c.competition_at(hf) == 0.0);
  CHECK(c.total_competition() == 0.0);
}

TEST_CASE("stale handles are rejected and slots are reused") {
  Configuration c(Domain::torus(1, 4.0), Kernel::zero(1), 0.0);
  const double a[] = {1.0}, b[] = {2.0};
  const Handle h = c.insert(a);
  c.remove(h);
  CHECK_FALSE(c.valid(h));
  CHECK_THROWS_AS(c.remove(h), slm::InvalidHandle);
  CHECK_THROWS_AS(c.position(h), slm::InvalidHandle);
  const Handle h2 = c.insert(b);
  CHECK(h2.slot == h.slot);
  CHECK(h2.generation != h.generation);
  CHECK(c.valid(h2));
  CHECK_THROWS_AS(c.competition_at(Handle{99, 0}), slm::InvalidHandle);
}

TEST_CASE("coincident points are refused, including after wrapping") {
  Configuration c(Domain::torus(1, 4.0), Kernel::zero(1), 0.0);
  const double a[] = {0.0}, wrapped[] = {4.0}, other[] = {8.0};
  c.insert(a);
  CHECK_THROWS_AS(c.insert(wrapped), slm::CoincidenceError);
  CHECK_THROWS_AS(c.insert(other), slm::CoincidenceError);
  CHECK(c.size() == 1);
  CHECK(c.contains_point(wrapped));
  CHECK_FALSE(c.has_coincident_points());
}

TEST_CASE("cell edge must divide the torus side") {
  CHECK_THROWS_AS(Configuration(Domain::torus(1, 10.0), Kernel::tophat(1, 1.0, 3.0), 3.0), slm::ConfigError);
  CHECK_NOTHROW(Configuration(Domain::torus(1, 10.0), Kernel::tophat(1, 1.0, 2.5), 2.5));
  CHECK_THROWS_AS(Configuration(Domain::torus(1, 10.0), Kernel::tophat(1, 1.0, 2.5), 2.0), slm::ConfigError);
  CHECK_THROWS_AS(Configuration(Domain::torus(2, 10.0), Kernel::tophat(1, 1.0, 1.0), 1.0), slm::ConfigError);
  try {
    Configuration(Domain::torus(1, 10.0), Kernel::tophat(1, 1.0, 3.0), 3.0);
  } catch (const slm::ConfigError& e) {
    CHECK(e.key() == "domain.side");
  }
}

TEST_CASE("free space configuration") {
  Configuration c(Domain::free_space(2), Kernel::tophat(2, 1.0, 1.0), 1.0);
  const double a[] = {-100.0, 3.0}, b[] = {-100.5, 3.0}, far[] = {50.0, 50.0};
  const Handle ha = c.insert(a);
  c.insert(b);
  c.insert(far);
  CHECK(c.competition_at(ha) == 1.0);
  CHECK(c.total_competition() == 2.0);
  check_against_brute_force(c);
}

TEST_CASE("neighbors_within matches a linear scan") {
  slm::RandomStream rng(24);
  Configuration c(Domain::torus(2, 10.0), Kernel::tophat(2, 1.0, 1.0), 1.0);
  for (int i = 0; i < 300; ++i) c.insert(random_point(rng, 2, 10.0));
  for (double r : {0.5, 1.0, 2.7, 8.0}) {
    const double q[] = {0.2, 9.9};
    auto found = c.neighbors_within(q, r);
    std::vector<Handle> expected;
    for (Handle h : c.handles())
      if (c.domain().distance(q, c.position(h)) <= r) expected.push_back(h);
    std::sort(found.begin(), found.end());
    std::sort(expected.begin(), expected.end());
    CHECK(found == expected);
  }
}

TEST_CASE("refresh reports negligible deviation") {
  slm::RandomStream rng(25);
  Configuration c(Domain::torus(2, 6.0), Kernel::gaussian(2, 2.0, 0.4), 3.0);
  std::vector<Handle> hs;
  for (int i = 0; i < 400; ++i) {
    hs.push_back(c.insert(random_point(rng, 2, 6.0)));
    if (i % 3 == 2) {
      c.remove(hs.front());
      hs.erase(hs.begin());
    }
  }
  const auto report = c.refresh();
  CHECK(report.total_deviation < 1e-10);
  CHECK(report.max_point_deviation < 1e-10);
  CHECK(c.total_competition() == report.total_fresh);
}

TEST_CASE("total rate") {
  Configuration c(Domain::torus(1, 10.0), Kernel::tophat(1, 0.5, 1.0), 1.0);
  const double a[] = {1.0}, b[] = {1.5};
  c.insert(a);
  c.insert(b);
  CHECK(c.total_rate(2.0, 0.7) == doctest::Approx(2.0 * 2 + 1.0 + 0.7 * 2));
  Configuration empty(Domain::torus(1, 10.0), Kernel::zero(1), 0.0);
  CHECK(empty.total_rate(2.0, 0.7) == 0.0);
}

TEST_CASE("handles are ordered by history, sorted_handles by slot") {
  Configuration c(Domain::torus(1, 10.0), Kernel::zero(1), 0.0);
  const double xs[][1] = {{1.0}, {2.0}, {3.0}, {4.0}};
  std::vector<Handle> hs;
  for (const auto& x : xs) hs.push_back(c.insert(x));
  c.remove(hs[1]);
  auto sorted = c.sorted_handles();
  CHECK(sorted.size() == 3);
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
}

TEST_CASE("insert then remove restores sums exactly") {
  slm::RandomStream rng(26);
  Configuration c(Domain::torus(2, 6.0), Kernel::gaussian(2, 1.3, 0.25, 2.0), 2.0);
  for (int i = 0; i < 60; ++i) c.insert(random_point(rng, 2, 6.0));
  std::vector<double> before;
  for (Handle h : c.sorted_handles()) before.push_back(c.competition_at(h));
  const double total = c.total_competition();
  const std::size_t n = c.size();
  for (int i = 0; i < 50; ++i) {
    const Handle h = c.insert(random_point(rng, 2, 6.0));
    c.remove(h);
  }
  CHECK(c.total_competition() == total);
  CHECK(c.size() == n);
  std::vector<double> after;
  for (Handle h : c.sorted_handles()) after.push_back(c.competition_at(h));
  CHECK(after == before);
}

TEST_CASE("documented small cases") {
  Configuration c(Domain::torus(1, 10.0), Kernel::tophat(1, 0.3, 1.0), 1.0);
  const double a[] = {2.0}, b[] = {2.4};
  const Handle ha = c.insert(a);
  CHECK(c.size() == 1);
  CHECK(c.total_competition() == 0.0);
  CHECK(c.competition_at(ha) == 0.0);
  CHECK(c.total_rate(1.0, 0.5) == doctest::Approx(1.5));
  const Handle hb = c.insert(b);
  CHECK(c.total_competition() == doctest::Approx(0.6));
  CHECK(c.competition_at(ha) == doctest::Approx(0.3));
  CHECK(c.total_rate(1.0, 0.5) == doctest::Approx(3.6));
  c.remove(hb);
  c.remove(ha);
  CHECK(c.empty());
  CHECK(c.total_rate(1.0, 0.5) == 0.0);
}
