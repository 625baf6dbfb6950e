#include "slm/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "slm/errors.hpp"

namespace slm::stats {

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("KS test needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sqrt_n = std::sqrt(n);
  return {d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d), 0.0};
}

TestResult chi_square_test(std::span<const double> observed, std::span<const double> expected_probabilities,
                           double min_expected) {
  if (observed.size() != expected_probabilities.size() || observed.empty())
    throw DomainError("chi-square test needs matching nonempty bins");
  double total = 0.0;
  for (double o : observed) total += o;

  std::vector<double> obs_pooled, exp_pooled;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected_probabilities[i] * total;
    if (e_acc >= min_expected) {
      obs_pooled.push_back(o_acc);
      exp_pooled.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (o_acc > 0.0 || e_acc > 0.0) {
    if (exp_pooled.empty()) {
      obs_pooled.push_back(o_acc);
      exp_pooled.push_back(e_acc);
    } else {
      obs_pooled.back() += o_acc;
      exp_pooled.back() += e_acc;
    }
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < obs_pooled.size(); ++i) {
    const double diff = obs_pooled[i] - exp_pooled[i];
    chi2 += exp_pooled[i] > 0.0 ? diff * diff / exp_pooled[i] : (diff == 0.0 ? 0.0 : INFINITY);
  }
  const double dof = static_cast<double>(obs_pooled.size()) - 1.0;
  if (dof < 1.0) return {chi2, 1.0, 0.0};
  if (!std::isfinite(chi2)) return {chi2, 0.0, dof};
  const boost::math::chi_squared dist(dof);
  return {chi2, boost::math::cdf(boost::math::complement(dist, chi2)), dof};
}

}  // namespace slm::stats
