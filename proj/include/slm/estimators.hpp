#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace slm {

/// Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  /// Some term had beta * count > kExpOverflowExponent.
  bool overflow = false;
};

/// Exponent beyond which a term e^{beta n} is flagged as overflowing.
inline constexpr double kExpOverflowExponent = 700.0;

/// Multiset of observed population counts.
///
/// All estimators are computed from the sorted histogram, so results are
/// bit-identical under any permutation of the sample and any merge order.
class CountHistogram {
 public:
  void add(std::uint64_t count, std::uint64_t weight = 1);
  void merge(const CountHistogram& other);

  std::uint64_t total() const { return total_; }
  const std::map<std::uint64_t, std::uint64_t>& bins() const { return bins_; }

  /// Sample mean of n^order (order 0 gives exactly 1).
  Estimate raw_moment(int order) const;
  /// Sample mean of e^{beta n}, evaluated with a max-shift (beta 0 gives exactly 1).
  Estimate exp_moment(double beta) const;
  /// Fraction of zero counts.
  Estimate extinction() const;

  friend bool operator==(const CountHistogram&, const CountHistogram&) = default;

 private:
  std::map<std::uint64_t, std::uint64_t> bins_;
  std::uint64_t total_ = 0;
};

Estimate raw_moment_empirical(std::span<const std::uint64_t> counts, int order);
/// Mean and standard error of e^{beta * count}; requires beta >= 0.
Estimate exp_moment_empirical(std::span<const std::uint64_t> counts, double beta);

/// Moment estimates at each observation time.
/// CSV layout: time,stat,order_or_beta,value,std_error,replicas
struct MomentReport {
  struct Row {
    double time = 0.0;
    std::string stat;  // raw_moment | exp_moment | extinction
    double order_or_beta = 0.0;
    Estimate estimate;
    std::uint64_t replicas = 0;
  };
  std::vector<Row> rows;

  /// Row lookup; throws std::out_of_range if absent.
  const Row& find(double time, const std::string& stat, double order_or_beta) const;
};

}  // namespace slm
