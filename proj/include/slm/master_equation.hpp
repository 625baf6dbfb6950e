#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "slm/model.hpp"
#include "slm/states.hpp"

namespace slm {

/// Birth and death rates of the population count when they depend on the
/// configuration only through its size:
///   lambda_n = <a+> n,   mu_n = m n + kappa n (n - 1).
/// kappa = 0 is the contact model; kappa > 0 is competition by a constant
/// kernel whose support covers the whole torus.
struct CountRates {
  double plus_mass = 0.0;
  double mortality = 0.0;
  double kappa = 0.0;

  double birth(std::size_t n) const { return plus_mass * static_cast<double>(n); }
  double death(std::size_t n) const {
    const auto x = static_cast<double>(n);
    return mortality * x + (n > 0 ? kappa * x * (x - 1.0) : 0.0);
  }
};

/// Throws NotCountDetermined unless the competition kernel is zero or is a
/// tophat whose range reaches every point of the torus.
CountRates build_count_rates(const SimParams& params);

/// Truncated count law p_0..p_Nmax plus the mass `leaked` past Nmax.
struct CountDistribution {
  std::vector<double> p;
  double leaked = 0.0;

  std::size_t n_max() const { return p.size() - 1; }
  double total_mass() const;
  double mean() const;
  /// sum_n p_n n^order.
  double raw_moment(int order) const;
  /// sum_n p_n n (n - 1).
  double factorial_moment2() const;
};

/// Initial count law truncated at n_max with the remainder booked as leaked.
CountDistribution initial_count_distribution(const InitialState& initial, const Domain& domain, std::size_t n_max);

struct EvolveOptions {
  double rel_tol = 1e-10;
  /// Absolute error floor per component.
  double abs_tol = 1e-14;
  /// Leaked mass above this at an output time raises TruncationError.
  double leak_tolerance = 1e-6;
  bool check_leak = true;
};

/// Integrates the forward equation
///   dp_n/dt = lambda_{n-1} p_{n-1} + mu_{n+1} p_{n+1} - (lambda_n + mu_n) p_n
/// on {0..Nmax} with an adaptive Dormand-Prince 5(4) scheme. Births out of
/// Nmax are removed from p and added to `leaked` (no reflection), so
/// sum p + leaked is conserved. Returns the distribution at each output time
/// (non-decreasing, >= 0).
///
/// Throws TruncationError when p0 has mass above n_max or when the leaked
/// mass exceeds the tolerance at an output time.
std::vector<CountDistribution> evolve(const CountDistribution& p0, const CountRates& rates,
                                      std::span<const double> times, std::size_t n_max,
                                      const EvolveOptions& options = {});

struct TiltedMoment {
  double value = 0.0;
  double leaked = 0.0;
};

/// E e^{beta n_t} on the truncated chain, integrated directly in the tilted
/// variables q_n = e^{beta n} p_n so the error control acts on the summands.
TiltedMoment tilted_exp_moment(const CountDistribution& p0, const CountRates& rates, double beta, double t,
                               std::size_t n_max, const EvolveOptions& options = {});

/// sum_n p_n e^{beta n}, evaluated with a max-shift.
double exp_moment(const CountDistribution& dist, double beta);

enum class SweepVerdict { converged, diverging };
std::string_view to_string(SweepVerdict verdict);

struct SweepRow {
  std::size_t n_max = 0;
  double t = 0.0;
  double value = 0.0;
  double leaked = 0.0;
  /// |value - previous| / |value|; 0 for the first row.
  double relative_change = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepVerdict verdict = SweepVerdict::diverging;
  double tolerance = 1e-6;
};

/// Relative change between the two largest truncations below which a sweep
/// counts as converged.
inline constexpr double kSweepTolerance = 1e-6;

/// Evaluates `observable` on the solution at time t for every truncation
/// level (strictly increasing). The verdict is `converged` when the value at
/// the largest level differs from the one before it by less than
/// kSweepTolerance relative. Leak checking is disabled: the leaked mass is
/// reported per row instead.
SweepResult sweep_observable(const std::function<CountDistribution(std::size_t)>& initial, const CountRates& rates,
                             double t, std::span<const std::size_t> n_max_list,
                             const std::function<double(const CountDistribution&)>& observable,
                             const EvolveOptions& options = {});

/// Sweep of the exponential moment E e^{beta n_t}.
SweepResult truncation_sweep(const std::function<CountDistribution(std::size_t)>& initial, const CountRates& rates,
                             double t, double beta, std::span<const std::size_t> n_max_list,
                             const EvolveOptions& options = {});

}  // namespace slm
