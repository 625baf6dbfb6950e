#include "slm/random.hpp"

#include <cmath>

namespace slm {

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

RandomStream RandomStream::for_replica(std::uint64_t base_seed, std::uint64_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
  RandomStream stream(0);
  stream.engine_.seed(seq);
  return stream;
}

double RandomStream::uniform() {
  // 53 random mantissa bits centred in their bucket: (k + 0.5) / 2^53.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) { return -std::log(uniform()) / rate; }

double RandomStream::normal() {
  // Marsaglia polar method; the second variate is discarded so the stream
  // carries no hidden state.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

std::uint64_t RandomStream::index(std::uint64_t n) {
  // Lemire's nearly-divisionless rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t RandomStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

void RandomStream::unit_vector(std::span<double> out) {
  if (out.size() == 1) {
    out[0] = (engine_() >> 63) ? 1.0 : -1.0;
    return;
  }
  for (;;) {
    double norm2 = 0.0;
    for (auto& c : out) {
      c = normal();
      norm2 += c * c;
    }
    if (norm2 > 1e-300) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& c : out) c *= inv;
      return;
    }
  }
}

}  // namespace slm
