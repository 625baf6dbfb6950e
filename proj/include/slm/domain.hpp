#pragma once

#include <span>

namespace slm {

enum class Geometry { torus, free_space };

/// Habitat: a periodic box [0, L)^d or all of R^d.
class Domain {
 public:
  static Domain torus(int dimension, double side);
  static Domain free_space(int dimension);

  Geometry geometry() const { return geometry_; }
  int dimension() const { return dimension_; }
  double side() const { return side_; }
  bool bounded() const { return geometry_ == Geometry::torus; }
  /// L^d on the torus; throws UnsupportedOperation in free space.
  double volume() const;

  /// Maps x into [0, L)^d on the torus; identity in free space.
  void wrap(std::span<double> x) const;
  /// b - a under the minimum-image convention.
  void displacement(std::span<const double> a, std::span<const double> b, std::span<double> out) const;
  double distance(std::span<const double> a, std::span<const double> b) const;
  /// Largest possible distance between two points (infinite in free space).
  double diameter() const;

 private:
  Domain(Geometry g, int d, double side) : geometry_(g), dimension_(d), side_(side) {}

  Geometry geometry_;
  int dimension_;
  double side_;
};

}  // namespace slm
