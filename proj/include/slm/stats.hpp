#pragma once

#include <functional>
#include <span>
#include <vector>

namespace slm::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
  double dof = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF. The p-value
/// uses the asymptotic Kolmogorov distribution with Stephens' small-sample
/// correction. `sample` is sorted in place.
TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Pearson chi-square goodness of fit. Adjacent bins are pooled left to right
/// until each pooled bin expects at least `min_expected` observations;
/// `expected` probabilities are scaled to the observed total.
TestResult chi_square_test(std::span<const double> observed, std::span<const double> expected_probabilities,
                           double min_expected = 5.0);

}  // namespace slm::stats
