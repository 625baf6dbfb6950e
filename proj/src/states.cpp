#include "slm/states.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "slm/errors.hpp"

namespace slm {

InitialState InitialState::poisson(double intensity) {
  InitialState s;
  s.kind = Kind::poisson;
  s.intensity = intensity;
  return s;
}

InitialState InitialState::fixed(std::uint64_t n) {
  InitialState s;
  s.kind = Kind::fixed_n;
  s.n = n;
  return s;
}

InitialState InitialState::explicit_list(std::vector<std::vector<double>> points) {
  InitialState s;
  s.kind = Kind::explicit_points;
  s.points = std::move(points);
  return s;
}

InitialState InitialState::count_law(std::vector<double> probabilities) {
  InitialState s;
  s.kind = Kind::count_law;
  s.count_probabilities = std::move(probabilities);
  return s;
}

InitialState InitialState::geometric(double beta_star) {
  InitialState s;
  s.kind = Kind::geometric;
  s.beta_star = beta_star;
  return s;
}

void InitialState::validate(const Domain& domain) const {
  const bool needs_window = kind == Kind::poisson || kind == Kind::fixed_n || kind == Kind::count_law ||
                            kind == Kind::geometric;
  if (needs_window && !domain.bounded() && !(kind == Kind::fixed_n && n == 0))
    throw ConfigError("initial.kind", "uniform placement requires a bounded (torus) domain");
  switch (kind) {
    case Kind::poisson:
      if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw ConfigError("initial.intensity", "must be >= 0");
      break;
    case Kind::fixed_n: break;
    case Kind::explicit_points:
      for (const auto& p : points) {
        if (p.size() != static_cast<std::size_t>(domain.dimension()))
          throw ConfigError("initial.points", "point dimension does not match the domain");
        for (double c : p)
          if (!std::isfinite(c)) throw ConfigError("initial.points", "non-finite coordinate");
      }
      break;
    case Kind::count_law: {
      if (count_probabilities.empty()) throw ConfigError("initial.probabilities", "must be nonempty");
      double sum = 0.0;
      for (double p : count_probabilities) {
        if (!(p >= 0.0)) throw ConfigError("initial.probabilities", "entries must be nonnegative");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("initial.probabilities", "must sum to 1 within 1e-12");
      break;
    }
    case Kind::geometric:
      if (!(beta_star > 0.0) || !std::isfinite(beta_star)) throw ConfigError("initial.beta_star", "must be > 0");
      break;
  }
}

std::vector<double> InitialState::count_distribution(const Domain& domain, std::size_t n_max, double& tail) const {
  std::vector<double> p(n_max + 1, 0.0);
  tail = 0.0;
  switch (kind) {
    case Kind::poisson: {
      const double mean = intensity * domain.volume();
      // log pmf recursion keeps large means finite.
      double log_term = -mean;
      double sum = 0.0;
      for (std::size_t k = 0; k <= n_max; ++k) {
        if (k > 0) log_term += std::log(mean) - std::log(static_cast<double>(k));
        p[k] = mean == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::exp(log_term);
        sum += p[k];
      }
      tail = std::max(0.0, 1.0 - sum);
      break;
    }
    case Kind::fixed_n:
    case Kind::explicit_points: {
      const std::size_t k = kind == Kind::fixed_n ? n : points.size();
      if (k <= n_max) {
        p[k] = 1.0;
      } else {
        tail = 1.0;
      }
      break;
    }
    case Kind::count_law:
      for (std::size_t k = 0; k < count_probabilities.size(); ++k) {
        if (k <= n_max) {
          p[k] = count_probabilities[k];
        } else {
          tail += count_probabilities[k];
        }
      }
      break;
    case Kind::geometric: {
      const double q = std::exp(-beta_star);
      for (std::size_t k = 0; k <= n_max; ++k) p[k] = (1.0 - q) * std::pow(q, static_cast<double>(k));
      tail = std::pow(q, static_cast<double>(n_max + 1));
      break;
    }
  }
  return p;
}

std::size_t InitialState::count_support(const Domain& domain, double tail_tolerance) const {
  switch (kind) {
    case Kind::fixed_n: return n;
    case Kind::explicit_points: return points.size();
    case Kind::count_law: {
      std::size_t last = 0;
      for (std::size_t k = 0; k < count_probabilities.size(); ++k)
        if (count_probabilities[k] > 0.0) last = k;
      return last;
    }
    case Kind::geometric: {
      const double q = std::exp(-beta_star);
      return static_cast<std::size_t>(std::ceil(std::log(tail_tolerance) / std::log(q)));
    }
    case Kind::poisson: {
      const double mean = intensity * domain.volume();
      if (mean == 0.0) return 0;
      double log_term = -mean;
      double cumulative = std::exp(log_term);
      std::size_t k = 0;
      // Rounding in the running sum can stall just below 1 for large means, so
      // also stop once the terms past the mode are negligible.
      const double log_floor = std::log(tail_tolerance) - 10.0;
      while (1.0 - cumulative >= tail_tolerance && !(static_cast<double>(k) > mean && log_term < log_floor)) {
        ++k;
        log_term += std::log(mean) - std::log(static_cast<double>(k));
        cumulative += std::exp(log_term);
      }
      return k;
    }
  }
  return 0;
}

namespace {

void place_uniform(Configuration& config, std::uint64_t count, RandomStream& rng) {
  const Domain& domain = config.domain();
  std::vector<double> x(static_cast<std::size_t>(domain.dimension()));
  for (std::uint64_t i = 0; i < count; ++i) {
    do {
      for (auto& c : x) c = rng.uniform() * domain.side();
      domain.wrap(x);
    } while (config.contains_point(x));
    config.insert(x);
  }
}

}  // namespace

Configuration sample_initial(const InitialState& spec, const SimParams& params, RandomStream& rng) {
  spec.validate(params.domain);
  Configuration config = params.empty_configuration();
  switch (spec.kind) {
    case InitialState::Kind::poisson:
      place_uniform(config, rng.poisson(spec.intensity * params.domain.volume()), rng);
      break;
    case InitialState::Kind::fixed_n: place_uniform(config, spec.n, rng); break;
    case InitialState::Kind::explicit_points:
      for (const auto& p : spec.points) config.insert(p);
      break;
    case InitialState::Kind::count_law: {
      double u = rng.uniform();
      std::size_t k = 0;
      for (; k + 1 < spec.count_probabilities.size(); ++k) {
        if (u < spec.count_probabilities[k]) break;
        u -= spec.count_probabilities[k];
      }
      place_uniform(config, k, rng);
      break;
    }
    case InitialState::Kind::geometric: {
      const double q = std::exp(-spec.beta_star);
      // P(N >= k) = q^k, so N = floor(log U / log q).
      const auto k = static_cast<std::uint64_t>(std::floor(std::log(rng.uniform()) / std::log(q)));
      place_uniform(config, k, rng);
      break;
    }
  }
  return config;
}

}  // namespace slm
