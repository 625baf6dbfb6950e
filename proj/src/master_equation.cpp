#include "slm/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>
#include <string>

#include "slm/errors.hpp"

namespace slm {

CountRates build_count_rates(const SimParams& params) {
  CountRates rates;
  rates.plus_mass = params.plus_mass();
  rates.mortality = params.mortality;
  const Kernel& comp = params.competition;
  if (comp.is_zero()) return rates;
  if (!params.domain.bounded())
    throw NotCountDetermined("competition in free space depends on point locations");
  if (comp.family() != KernelFamily::tophat)
    throw NotCountDetermined("competition kernel " + std::string(to_string(comp.family())) +
                             " is not constant on its support");
  if (comp.range() < params.domain.diameter())
    throw NotCountDetermined("competition range " + std::to_string(comp.range()) +
                             " does not cover the torus (diameter " + std::to_string(params.domain.diameter()) + ")");
  rates.kappa = comp.peak();
  return rates;
}

double CountDistribution::total_mass() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

double CountDistribution::mean() const { return raw_moment(1); }

double CountDistribution::raw_moment(int order) const {
  double s = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) s += p[n] * std::pow(static_cast<double>(n), order);
  return s;
}

double CountDistribution::factorial_moment2() const {
  double s = 0.0;
  for (std::size_t n = 2; n < p.size(); ++n) {
    const auto x = static_cast<double>(n);
    s += p[n] * x * (x - 1.0);
  }
  return s;
}

CountDistribution initial_count_distribution(const InitialState& initial, const Domain& domain, std::size_t n_max) {
  CountDistribution d;
  d.p = initial.count_distribution(domain, n_max, d.leaked);
  return d;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// Tridiagonal generator; component n_max + 1 is the leaked mass. With tilt
// beta the state is q_n = e^{beta n} p_n and the leak stays untilted.
class CountGenerator {
 public:
  CountGenerator(const CountRates& rates, std::size_t n_max, double tilt = 0.0)
      : n_max_(n_max), birth_(n_max + 1), death_(n_max + 1) {
    for (std::size_t n = 0; n <= n_max; ++n) {
      birth_[n] = rates.birth(n);
      death_[n] = rates.death(n);
    }
    up_ = std::exp(tilt);
    down_ = std::exp(-tilt);
    leak_ = birth_[n_max] * std::exp(-tilt * static_cast<double>(n_max));
  }

  void apply(const std::vector<double>& y, std::vector<double>& dy) const {
    for (std::size_t n = 0; n <= n_max_; ++n) {
      double v = -(birth_[n] + death_[n]) * y[n];
      if (n > 0) v += up_ * birth_[n - 1] * y[n - 1];
      if (n < n_max_) v += down_ * death_[n + 1] * y[n + 1];
      dy[n] = v;
    }
    dy[n_max_ + 1] = leak_ * y[n_max_];
  }

  double max_exit_rate() const {
    double r = 0.0;
    for (std::size_t n = 0; n <= n_max_; ++n) r = std::max(r, birth_[n] + death_[n]);
    return r;
  }

 private:
  std::size_t n_max_;
  std::vector<double> birth_, death_;
  double up_ = 1.0, down_ = 1.0, leak_ = 0.0;
};

// Adaptive Dormand-Prince 5(4) with FSAL; calls `emit` at every output time.
void integrate(std::vector<double>& y, const CountGenerator& gen, std::span<const double> times,
               const EvolveOptions& options, const std::function<void(double)>& emit) {
  const std::size_t dim = y.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim), y_new(dim);

  const double rate_scale = gen.max_exit_rate();
  double h = rate_scale > 0.0 ? 0.1 / rate_scale : std::numeric_limits<double>::infinity();
  double t = 0.0;
  gen.apply(y, k1);

  for (double t_out : times) {
    while (t < t_out) {
      const double remaining = t_out - t;
      bool last = false;
      double step = h;
      if (step >= remaining) {
        step = remaining;
        last = true;
      }
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + step * a21 * k1[i];
      gen.apply(tmp, k2);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + step * (a31 * k1[i] + a32 * k2[i]);
      gen.apply(tmp, k3);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      gen.apply(tmp, k4);
      for (std::size_t i = 0; i < dim; ++i)
        tmp[i] = y[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      gen.apply(tmp, k5);
      for (std::size_t i = 0; i < dim; ++i)
        tmp[i] = y[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      gen.apply(tmp, k6);
      for (std::size_t i = 0; i < dim; ++i)
        y_new[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      gen.apply(y_new, k7);

      double err = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double scale = options.abs_tol + options.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err = std::max(err, std::abs(e) / scale);
      }
      if (!std::isfinite(err)) err = 1e10;

      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = last ? t_out : t + step;
        y.swap(y_new);
        k1.swap(k7);  // first-same-as-last
        h = last ? std::max(h, step * factor) : step * factor;
      } else {
        h = step * factor;
      }
      if (!(h > 0.0) || h < 1e-300) throw NumericalDriftError("master-equation step size underflow");
    }
    emit(t_out);
  }
}

void check_inputs(const CountDistribution& p0, std::span<const double> times, std::size_t n_max) {
  for (std::size_t n = n_max + 1; n < p0.p.size(); ++n)
    if (p0.p[n] != 0.0)
      throw TruncationError("initial distribution has mass at n = " + std::to_string(n) + " above Nmax = " +
                            std::to_string(n_max));
  if (std::abs(p0.total_mass() + p0.leaked - 1.0) > 1e-12)
    throw DomainError("initial distribution must have total mass 1 within 1e-12");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1]) throw DomainError("output times must be non-decreasing");
  if (!times.empty() && times.front() < 0.0) throw DomainError("output times must be >= 0");
}

}  // namespace

std::vector<CountDistribution> evolve(const CountDistribution& p0, const CountRates& rates,
                                      std::span<const double> times, std::size_t n_max,
                                      const EvolveOptions& options) {
  check_inputs(p0, times, n_max);
  std::vector<double> y(n_max + 2, 0.0);
  std::copy_n(p0.p.begin(), std::min(p0.p.size(), n_max + 1), y.begin());
  y[n_max + 1] = p0.leaked;

  std::vector<CountDistribution> out;
  out.reserve(times.size());
  integrate(y, CountGenerator(rates, n_max), times, options, [&](double t) {
    CountDistribution d;
    d.p.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_max + 1));
    d.leaked = y[n_max + 1];
    if (options.check_leak && d.leaked > options.leak_tolerance)
      throw TruncationError("leaked mass " + std::to_string(d.leaked) + " at t = " + std::to_string(t) +
                            " exceeds tolerance; raise Nmax above " + std::to_string(n_max));
    out.push_back(std::move(d));
  });
  return out;
}

TiltedMoment tilted_exp_moment(const CountDistribution& p0, const CountRates& rates, double beta, double t,
                               std::size_t n_max, const EvolveOptions& options) {
  if (!(beta >= 0.0)) throw DomainError("exponential moment needs beta >= 0");
  const double times[] = {t};
  check_inputs(p0, times, n_max);
  std::vector<double> y(n_max + 2, 0.0);
  for (std::size_t n = 0; n <= n_max && n < p0.p.size(); ++n)
    if (p0.p[n] != 0.0) y[n] = std::exp(beta * static_cast<double>(n) + std::log(p0.p[n]));
  y[n_max + 1] = p0.leaked;
  integrate(y, CountGenerator(rates, n_max, beta), times, options, [](double) {});
  TiltedMoment m;
  for (std::size_t n = 0; n <= n_max; ++n) m.value += y[n];
  m.leaked = y[n_max + 1];
  return m;
}

double exp_moment(const CountDistribution& dist, double beta) {
  if (!(beta >= 0.0)) throw DomainError("exponential moment needs beta >= 0");
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < dist.p.size(); ++n)
    if (dist.p[n] != 0.0) shift = std::max(shift, beta * static_cast<double>(n) + std::log(std::abs(dist.p[n])));
  if (!std::isfinite(shift)) return 0.0;
  double sum = 0.0;
  for (std::size_t n = 0; n < dist.p.size(); ++n) {
    if (dist.p[n] == 0.0) continue;
    const double mag = std::exp(beta * static_cast<double>(n) + std::log(std::abs(dist.p[n])) - shift);
    sum += dist.p[n] > 0.0 ? mag : -mag;
  }
  return sum * std::exp(shift);
}

std::string_view to_string(SweepVerdict verdict) {
  return verdict == SweepVerdict::converged ? "converged" : "diverging";
}

namespace {

SweepResult run_sweep(std::span<const std::size_t> n_max_list, double t,
                      const std::function<std::pair<double, double>(std::size_t)>& value_and_leak) {
  if (n_max_list.empty()) throw DomainError("truncation sweep needs at least one Nmax");
  for (std::size_t i = 1; i < n_max_list.size(); ++i)
    if (n_max_list[i] <= n_max_list[i - 1]) throw DomainError("Nmax list must be strictly increasing");
  SweepResult result;
  result.tolerance = kSweepTolerance;
  for (std::size_t n_max : n_max_list) {
    SweepRow row;
    row.n_max = n_max;
    row.t = t;
    std::tie(row.value, row.leaked) = value_and_leak(n_max);
    if (!result.rows.empty()) {
      const double prev = result.rows.back().value;
      row.relative_change = row.value == prev ? 0.0 : std::abs(row.value - prev) / std::abs(row.value);
    }
    result.rows.push_back(row);
  }
  const bool finite = std::isfinite(result.rows.back().value);
  const bool settled = result.rows.size() == 1 || result.rows.back().relative_change < kSweepTolerance;
  result.verdict = finite && settled ? SweepVerdict::converged : SweepVerdict::diverging;
  return result;
}

}  // namespace

SweepResult sweep_observable(const std::function<CountDistribution(std::size_t)>& initial, const CountRates& rates,
                             double t, std::span<const std::size_t> n_max_list,
                             const std::function<double(const CountDistribution&)>& observable,
                             const EvolveOptions& options) {
  EvolveOptions opts = options;
  opts.check_leak = false;
  const double times[] = {t};
  return run_sweep(n_max_list, t, [&](std::size_t n_max) {
    const CountDistribution pt = evolve(initial(n_max), rates, times, n_max, opts).front();
    return std::pair{observable(pt), pt.leaked};
  });
}

SweepResult truncation_sweep(const std::function<CountDistribution(std::size_t)>& initial, const CountRates& rates,
                             double t, double beta, std::span<const std::size_t> n_max_list,
                             const EvolveOptions& options) {
  return run_sweep(n_max_list, t, [&](std::size_t n_max) {
    const TiltedMoment m = tilted_exp_moment(initial(n_max), rates, beta, t, n_max, options);
    return std::pair{m.value, m.leaked};
  });
}

}  // namespace slm
