#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "slm/random.hpp"

namespace slm {

enum class KernelFamily { tophat, gaussian, exponential, tabulated };

std::string_view to_string(KernelFamily family);

/// Symmetric, nonnegative, radially symmetric interaction function on R^d
/// with compact support |x| <= range().
///
/// Used both as the dispersal kernel (offspring displacement density times
/// the per-capita birth rate) and as the pairwise competition kernel.
/// Values are immutable after construction.
///
/// Gaussian and exponential profiles are truncated at a cutoff where the
/// discarded tail is at most 1e-12 of the untruncated integral; the profile
/// is then scaled so that the *truncated* integral equals the requested mass.
class Kernel {
 public:
  /// Relative tail mass tolerated when truncating infinite-support profiles.
  static constexpr double kTailTolerance = 1e-12;

  /// The identically-zero kernel (e.g. no competition).
  static Kernel zero(int dimension);
  /// Constant `height` on the closed ball of radius `range`.
  static Kernel tophat(int dimension, double height, double range);
  static Kernel tophat_with_mass(int dimension, double mass, double range);
  /// mass * N(0, sigma^2 I) restricted to the ball; `range <= 0` picks the
  /// smallest cutoff meeting kTailTolerance.
  static Kernel gaussian(int dimension, double mass, double sigma, double range = 0.0);
  /// Radial profile proportional to exp(-|x| / length).
  static Kernel exponential(int dimension, double mass, double length, double range = 0.0);
  /// Piecewise-linear radial profile through values[i] at r_i = i * range / (K - 1).
  static Kernel tabulated(int dimension, double range, std::vector<double> values);

  double eval(std::span<const double> dx) const;
  /// Profile as a function of the Euclidean norm.
  double eval_radial(double r) const;

  double mass() const { return mass_; }
  double range() const { return range_; }
  int dimension() const { return dimension_; }
  KernelFamily family() const { return family_; }
  bool is_zero() const { return mass_ == 0.0; }
  /// sup_x eval(x).
  double peak() const { return peak_; }

  /// Family shape parameter: sigma (gaussian), length (exponential), 0 otherwise.
  double shape() const { return shape_; }
  const std::vector<double>& table() const { return table_; }

  /// Probability that a displacement drawn from eval/mass has norm <= r.
  double radial_cdf(double r) const;

  /// Draws a displacement with density eval/mass; throws UnsupportedOperation
  /// for a zero-mass kernel.
  void sample_displacement(RandomStream& rng, std::span<double> out) const;
  double sample_radius(RandomStream& rng) const;

 private:
  Kernel() = default;
  void finish_tabulated();

  KernelFamily family_ = KernelFamily::tophat;
  int dimension_ = 1;
  double mass_ = 0.0;
  double range_ = 0.0;
  double amplitude_ = 0.0;  // profile value at r = 0 (tophat height)
  double peak_ = 0.0;
  double shape_ = 0.0;
  double truncated_fraction_ = 1.0;  // regularized incomplete gamma at the cutoff
  std::vector<double> table_;
  std::vector<double> table_cumulative_;  // mass of the shell [0, r_i]
};

/// Surface area of the unit sphere S^{d-1} (2 for d = 1).
double unit_sphere_area(int dimension);
double ball_volume(int dimension, double radius);

}  // namespace slm
