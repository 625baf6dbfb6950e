#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace slm {

/// Owned pseudo-random stream. Streams are never shared between replicas.
///
/// All variates are derived from the raw 64-bit engine output by code in this
/// class, so a given seed produces the same sequence on every platform except
/// for `poisson`, which delegates to the standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Stream for replica `replica` of an ensemble with base seed `base_seed`.
  /// The engine is seeded through std::seed_seq from the four 32-bit words
  /// (base low, base high, replica low, replica high), so every
  /// (base, replica) pair maps to its own stream.
  static RandomStream for_replica(std::uint64_t base_seed, std::uint64_t replica);

  std::uint64_t bits() { return engine_(); }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential waiting time with the given rate (> 0).
  double exponential(double rate);

  double normal();

  /// Unbiased integer in [0, n), n > 0.
  std::uint64_t index(std::uint64_t n);

  std::uint64_t poisson(double mean);

  /// Uniformly distributed unit vector in R^d (d = 1 gives ±1).
  void unit_vector(std::span<double> out);

 private:
  std::mt19937_64 engine_;
};

}  // namespace slm
