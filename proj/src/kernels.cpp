#include "slm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "slm/errors.hpp"

namespace slm {

namespace {

void require_dimension(int d) {
  if (d < 1) throw DomainError("kernel dimension must be >= 1, got " + std::to_string(d));
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be nonnegative and finite");
}

// Uniform draw from the ball of radius `range`, inverse CDF on the radius.
double uniform_ball_radius(RandomStream& rng, int d, double range) {
  return range * std::pow(rng.uniform(), 1.0 / d);
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::tophat: return "tophat";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

double unit_sphere_area(int dimension) {
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double ball_volume(int dimension, double radius) {
  return unit_sphere_area(dimension) * std::pow(radius, dimension) / dimension;
}

Kernel Kernel::zero(int dimension) {
  require_dimension(dimension);
  Kernel k;
  k.dimension_ = dimension;
  return k;
}

Kernel Kernel::tophat(int dimension, double height, double range) {
  require_dimension(dimension);
  require_nonnegative(height, "tophat height");
  require_positive(range, "kernel range");
  Kernel k;
  k.family_ = KernelFamily::tophat;
  k.dimension_ = dimension;
  k.range_ = range;
  k.amplitude_ = height;
  k.peak_ = height;
  k.mass_ = height * ball_volume(dimension, range);
  return k;
}

Kernel Kernel::tophat_with_mass(int dimension, double mass, double range) {
  require_dimension(dimension);
  require_nonnegative(mass, "kernel mass");
  require_positive(range, "kernel range");
  Kernel k = tophat(dimension, mass / ball_volume(dimension, range), range);
  k.mass_ = mass;
  return k;
}

Kernel Kernel::gaussian(int dimension, double mass, double sigma, double range) {
  require_dimension(dimension);
  require_nonnegative(mass, "kernel mass");
  require_positive(sigma, "gaussian sigma");
  const double a = 0.5 * dimension;
  const double min_range = sigma * std::sqrt(2.0 * boost::math::gamma_q_inv(a, kTailTolerance));
  if (range <= 0.0) {
    range = min_range;
  } else if (boost::math::gamma_q(a, range * range / (2.0 * sigma * sigma)) > kTailTolerance * (1.0 + 1e-6)) {
    throw DomainError("gaussian range " + std::to_string(range) + " discards more than 1e-12 of the mass (minimum " +
                      std::to_string(min_range) + ")");
  }
  Kernel k;
  k.family_ = KernelFamily::gaussian;
  k.dimension_ = dimension;
  k.range_ = range;
  k.shape_ = sigma;
  k.mass_ = mass;
  k.truncated_fraction_ = boost::math::gamma_p(a, range * range / (2.0 * sigma * sigma));
  // Untruncated integral of exp(-r^2 / 2 sigma^2) over R^d is (2 pi sigma^2)^{d/2}.
  const double truncated_integral =
      std::pow(2.0 * std::numbers::pi * sigma * sigma, a) * k.truncated_fraction_;
  k.amplitude_ = mass / truncated_integral;
  k.peak_ = k.amplitude_;
  return k;
}

Kernel Kernel::exponential(int dimension, double mass, double length, double range) {
  require_dimension(dimension);
  require_nonnegative(mass, "kernel mass");
  require_positive(length, "exponential length");
  const double a = dimension;
  const double min_range = length * boost::math::gamma_q_inv(a, kTailTolerance);
  if (range <= 0.0) {
    range = min_range;
  } else if (boost::math::gamma_q(a, range / length) > kTailTolerance * (1.0 + 1e-6)) {
    throw DomainError("exponential range " + std::to_string(range) + " discards more than 1e-12 of the mass (minimum " +
                      std::to_string(min_range) + ")");
  }
  Kernel k;
  k.family_ = KernelFamily::exponential;
  k.dimension_ = dimension;
  k.range_ = range;
  k.shape_ = length;
  k.mass_ = mass;
  k.truncated_fraction_ = boost::math::gamma_p(a, range / length);
  // Untruncated integral of exp(-r / l) over R^d is |S^{d-1}| l^d Gamma(d).
  const double truncated_integral =
      unit_sphere_area(dimension) * std::pow(length, a) * std::tgamma(a) * k.truncated_fraction_;
  k.amplitude_ = mass / truncated_integral;
  k.peak_ = k.amplitude_;
  return k;
}

Kernel Kernel::tabulated(int dimension, double range, std::vector<double> values) {
  require_dimension(dimension);
  require_positive(range, "kernel range");
  if (values.size() < 2) throw DomainError("tabulated kernel needs at least 2 values");
  for (double v : values) require_nonnegative(v, "tabulated kernel value");
  Kernel k;
  k.family_ = KernelFamily::tabulated;
  k.dimension_ = dimension;
  k.range_ = range;
  k.table_ = std::move(values);
  k.finish_tabulated();
  return k;
}

void Kernel::finish_tabulated() {
  const std::size_t segments = table_.size() - 1;
  const double h = range_ / static_cast<double>(segments);
  const int d = dimension_;
  const double area = unit_sphere_area(d);
  table_cumulative_.assign(table_.size(), 0.0);
  // Exact integral of the interpolant a + b r against |S^{d-1}| r^{d-1} dr.
  for (std::size_t i = 0; i < segments; ++i) {
    const double r0 = h * static_cast<double>(i);
    const double r1 = (i + 1 == segments) ? range_ : h * static_cast<double>(i + 1);
    const double slope = (table_[i + 1] - table_[i]) / h;
    const double intercept = table_[i] - slope * r0;
    const double piece = intercept * (std::pow(r1, d) - std::pow(r0, d)) / d +
                         slope * (std::pow(r1, d + 1) - std::pow(r0, d + 1)) / (d + 1);
    table_cumulative_[i + 1] = table_cumulative_[i] + area * piece;
  }
  mass_ = table_cumulative_.back();
  amplitude_ = table_.front();
  peak_ = *std::max_element(table_.begin(), table_.end());
}

double Kernel::eval_radial(double r) const {
  if (!(r <= range_) || mass_ == 0.0) return 0.0;
  switch (family_) {
    case KernelFamily::tophat: return amplitude_;
    case KernelFamily::gaussian: return amplitude_ * std::exp(-r * r / (2.0 * shape_ * shape_));
    case KernelFamily::exponential: return amplitude_ * std::exp(-r / shape_);
    case KernelFamily::tabulated: {
      const std::size_t segments = table_.size() - 1;
      const double pos = r / range_ * static_cast<double>(segments);
      const auto i = std::min(static_cast<std::size_t>(pos), segments - 1);
      const double frac = pos - static_cast<double>(i);
      return table_[i] + (table_[i + 1] - table_[i]) * frac;
    }
  }
  return 0.0;
}

double Kernel::eval(std::span<const double> dx) const {
  if (dx.size() != static_cast<std::size_t>(dimension_))
    throw DomainError("displacement has dimension " + std::to_string(dx.size()) + ", kernel expects " +
                      std::to_string(dimension_));
  double r2 = 0.0;
  for (double c : dx) {
    if (!std::isfinite(c)) throw DomainError("non-finite displacement");
    r2 += c * c;
  }
  return eval_radial(std::sqrt(r2));
}

double Kernel::radial_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= range_) return 1.0;
  const int d = dimension_;
  switch (family_) {
    case KernelFamily::tophat: return std::pow(r / range_, d);
    case KernelFamily::gaussian:
      return boost::math::gamma_p(0.5 * d, r * r / (2.0 * shape_ * shape_)) / truncated_fraction_;
    case KernelFamily::exponential: return boost::math::gamma_p(static_cast<double>(d), r / shape_) / truncated_fraction_;
    case KernelFamily::tabulated: {
      const std::size_t segments = table_.size() - 1;
      const double h = range_ / static_cast<double>(segments);
      const auto i = std::min(static_cast<std::size_t>(r / h), segments - 1);
      const double r0 = h * static_cast<double>(i);
      const double slope = (table_[i + 1] - table_[i]) / h;
      const double intercept = table_[i] - slope * r0;
      const double piece = intercept * (std::pow(r, d) - std::pow(r0, d)) / d +
                           slope * (std::pow(r, d + 1) - std::pow(r0, d + 1)) / (d + 1);
      return (table_cumulative_[i] + unit_sphere_area(d) * piece) / mass_;
    }
  }
  return 1.0;
}

double Kernel::sample_radius(RandomStream& rng) const {
  if (mass_ == 0.0) throw UnsupportedOperation("cannot sample a displacement from a zero-mass kernel");
  const int d = dimension_;
  switch (family_) {
    case KernelFamily::tophat: return uniform_ball_radius(rng, d, range_);
    case KernelFamily::exponential: {
      const double u = rng.uniform() * truncated_fraction_;
      return std::min(range_, shape_ * boost::math::gamma_p_inv(static_cast<double>(d), u));
    }
    case KernelFamily::gaussian:
    case KernelFamily::tabulated:
      // Rejection from the tophat envelope of height peak().
      for (;;) {
        const double r = uniform_ball_radius(rng, d, range_);
        if (rng.uniform() * peak_ < eval_radial(r)) return r;
      }
  }
  return 0.0;
}

void Kernel::sample_displacement(RandomStream& rng, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(dimension_)) throw DomainError("output span has wrong dimension");
  const double r = sample_radius(rng);
  rng.unit_vector(out);
  for (auto& c : out) c *= r;
}

}  // namespace slm
