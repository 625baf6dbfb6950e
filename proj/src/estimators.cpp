#include "slm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slm/errors.hpp"

namespace slm {

void CountHistogram::add(std::uint64_t count, std::uint64_t weight) {
  if (weight == 0) return;
  bins_[count] += weight;
  total_ += weight;
}

void CountHistogram::merge(const CountHistogram& other) {
  for (const auto& [count, weight] : other.bins_) add(count, weight);
}

Estimate CountHistogram::raw_moment(int order) const {
  if (order < 0) throw DomainError("moment order must be >= 0");
  Estimate e;
  if (total_ == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
  if (order == 0) return {1.0, 0.0, false};
  const double n = static_cast<double>(total_);
  double sum = 0.0;
  for (const auto& [count, weight] : bins_)
    sum += static_cast<double>(weight) * std::pow(static_cast<double>(count), order);
  e.value = sum / n;
  if (total_ > 1) {
    double ss = 0.0;
    for (const auto& [count, weight] : bins_) {
      const double dev = std::pow(static_cast<double>(count), order) - e.value;
      ss += static_cast<double>(weight) * dev * dev;
    }
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

Estimate CountHistogram::exp_moment(double beta) const {
  if (!(beta >= 0.0)) throw DomainError("exponential moment needs beta >= 0");
  if (total_ == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
  if (beta == 0.0) return {1.0, 0.0, false};
  const double n = static_cast<double>(total_);
  const double shift = beta * static_cast<double>(bins_.rbegin()->first);
  Estimate e;
  e.overflow = shift > kExpOverflowExponent;
  double sum = 0.0;
  for (const auto& [count, weight] : bins_)
    sum += static_cast<double>(weight) * std::exp(beta * static_cast<double>(count) - shift);
  const double scaled_mean = sum / n;
  double se_scaled = 0.0;
  if (total_ > 1) {
    double ss = 0.0;
    for (const auto& [count, weight] : bins_) {
      const double dev = std::exp(beta * static_cast<double>(count) - shift) - scaled_mean;
      ss += static_cast<double>(weight) * dev * dev;
    }
    se_scaled = std::sqrt(ss / (n - 1.0) / n);
  }
  // exp(shift) may overflow to +inf; the flag records it.
  const double factor = std::exp(shift);
  e.value = scaled_mean * factor;
  e.std_error = se_scaled * factor;
  return e;
}

Estimate CountHistogram::extinction() const {
  if (total_ == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
  const double n = static_cast<double>(total_);
  const auto it = bins_.find(0);
  const double p = it == bins_.end() ? 0.0 : static_cast<double>(it->second) / n;
  return {p, total_ > 1 ? std::sqrt(p * (1.0 - p) / (n - 1.0)) : 0.0, false};
}

namespace {
CountHistogram histogram_of(std::span<const std::uint64_t> counts) {
  CountHistogram h;
  for (auto c : counts) h.add(c);
  return h;
}
}  // namespace

Estimate raw_moment_empirical(std::span<const std::uint64_t> counts, int order) {
  return histogram_of(counts).raw_moment(order);
}

Estimate exp_moment_empirical(std::span<const std::uint64_t> counts, double beta) {
  return histogram_of(counts).exp_moment(beta);
}

const MomentReport::Row& MomentReport::find(double time, const std::string& stat, double order_or_beta) const {
  auto it = std::find_if(rows.begin(), rows.end(), [&](const Row& r) {
    return r.time == time && r.stat == stat && r.order_or_beta == order_or_beta;
  });
  if (it == rows.end()) throw std::out_of_range("no report row for " + stat);
  return *it;
}

}  // namespace slm
