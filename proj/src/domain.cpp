#include "slm/domain.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "slm/errors.hpp"

namespace slm {

Domain Domain::torus(int dimension, double side) {
  if (dimension < 1) throw DomainError("dimension must be >= 1");
  if (!(side > 0.0) || !std::isfinite(side)) throw DomainError("torus side must be positive and finite");
  return Domain(Geometry::torus, dimension, side);
}

Domain Domain::free_space(int dimension) {
  if (dimension < 1) throw DomainError("dimension must be >= 1");
  return Domain(Geometry::free_space, dimension, 0.0);
}

double Domain::volume() const {
  if (!bounded()) throw UnsupportedOperation("free space has infinite volume");
  return std::pow(side_, dimension_);
}

void Domain::wrap(std::span<double> x) const {
  if (!bounded()) return;
  for (auto& c : x) {
    c -= side_ * std::floor(c / side_);
    if (c >= side_) c = 0.0;  // -tiny wraps to exactly L in floating point
  }
}

void Domain::displacement(std::span<const double> a, std::span<const double> b, std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) {
    double d = b[i] - a[i];
    if (bounded()) d -= side_ * std::nearbyint(d / side_);
    out[i] = d;
  }
}

double Domain::distance(std::span<const double> a, std::span<const double> b) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = b[i] - a[i];
    if (bounded()) d -= side_ * std::nearbyint(d / side_);
    r2 += d * d;
  }
  return std::sqrt(r2);
}

double Domain::diameter() const {
  if (!bounded()) return std::numeric_limits<double>::infinity();
  return 0.5 * side_ * std::sqrt(static_cast<double>(dimension_));
}

}  // namespace slm
