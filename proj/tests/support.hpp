#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "slm/kernels.hpp"
#include "slm/model.hpp"

namespace slm::testing {

// Integral of a radial kernel over R^d in polar coordinates, split at the
// table nodes so piecewise-linear profiles are integrated exactly.
inline double radial_integral(const Kernel& k, double r_max) {
  const int d = k.dimension();
  auto f = [&](double r) { return k.eval_radial(r) * unit_sphere_area(d) * std::pow(r, d - 1); };
  std::vector<double> nodes{0.0};
  const std::size_t pieces = k.table().size() > 1 ? k.table().size() - 1 : 8;
  for (std::size_t i = 1; i <= pieces; ++i) nodes.push_back(std::min(r_max, k.range() * i / pieces));
  double total = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i] <= nodes[i - 1]) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, nodes[i - 1], nodes[i], 15, 1e-14);
  }
  return total;
}

inline SimParams contact_1d(double side, double m, double plus_mass, double range = 1.0) {
  SimParams p;
  p.domain = Domain::torus(1, side);
  p.mortality = m;
  p.dispersal = Kernel::tophat_with_mass(1, plus_mass, range);
  p.competition = Kernel::zero(1);
  return p;
}

inline SimParams mean_field_1d(double side, double m, double plus_mass, double kappa) {
  SimParams p = contact_1d(side, m, plus_mass);
  p.competition = Kernel::tophat(1, kappa, side / 2.0);
  return p;
}

inline SimParams local_competition_2d(double side, double m, double plus_mass, double height, double range) {
  SimParams p;
  p.domain = Domain::torus(2, side);
  p.mortality = m;
  p.dispersal = Kernel::gaussian(2, plus_mass, 0.25, 2.0);
  p.competition = Kernel::tophat(2, height, range);
  return p;
}

}  // namespace slm::testing
