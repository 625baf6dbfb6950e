#pragma once

#include <cstdint>
#include <vector>

#include "slm/configuration.hpp"
#include "slm/model.hpp"
#include "slm/random.hpp"

namespace slm {

/// Law of the initial configuration.
///
/// `poisson` is the homogeneous Poisson point process of intensity rho on the
/// torus; `count_law` and `geometric` draw a count from the given law and
/// place that many i.i.d. uniform points. `geometric` is p_n = (1 - q) q^n
/// with q = e^{-beta_star}, whose exponential moment is finite exactly for
/// beta < beta_star.
struct InitialState {
  enum class Kind { poisson, fixed_n, explicit_points, count_law, geometric };

  Kind kind = Kind::fixed_n;
  double intensity = 0.0;
  std::uint64_t n = 0;
  std::vector<std::vector<double>> points;
  std::vector<double> count_probabilities;
  double beta_star = 0.0;

  static InitialState poisson(double intensity);
  static InitialState fixed(std::uint64_t n);
  static InitialState explicit_list(std::vector<std::vector<double>> points);
  static InitialState count_law(std::vector<double> probabilities);
  static InitialState geometric(double beta_star);

  /// Throws ConfigError on invalid parameters (negative intensity, count law
  /// not summing to 1 within 1e-12, ...).
  void validate(const Domain& domain) const;

  /// P(|gamma_0| = k) for k <= n_max; `tail` receives the mass above n_max.
  std::vector<double> count_distribution(const Domain& domain, std::size_t n_max, double& tail) const;
  /// Smallest n_max for which the discarded tail is below `tail_tolerance`.
  std::size_t count_support(const Domain& domain, double tail_tolerance = 1e-12) const;
};

/// Draws gamma_0 into an empty configuration indexed for `params`.
/// Uniform placements that coincide with an existing point are redrawn.
Configuration sample_initial(const InitialState& spec, const SimParams& params, RandomStream& rng);

}  // namespace slm
