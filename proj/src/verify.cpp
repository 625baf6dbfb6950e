#include "slm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slm/errors.hpp"
#include "slm/master_equation.hpp"

namespace slm {

Horizon horizon(double beta_hi, double beta_lo, double plus_mass) {
  if (!(beta_lo > 0.0) || !(beta_lo < beta_hi)) throw DomainError("horizon needs 0 < beta_lo < beta_hi");
  if (!(plus_mass >= 0.0)) throw DomainError("horizon needs <a+> >= 0");
  if (plus_mass == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {(beta_hi - beta_lo) * std::exp(-beta_hi) / plus_mass, false};
}

bool BetaWindow::contains(double beta) const {
  switch (kind) {
    case Kind::all_positive: return beta > 0.0;
    case Kind::interval: return beta > 0.0 && beta < upper;
    case Kind::empty: return false;
  }
  return false;
}

BetaWindow beta_window(double mortality, double plus_mass) {
  if (plus_mass == 0.0) return {BetaWindow::Kind::all_positive, std::numeric_limits<double>::infinity()};
  if (mortality > plus_mass && plus_mass > 0.0)
    return {BetaWindow::Kind::interval, std::log(mortality) - std::log(plus_mass)};
  return {BetaWindow::Kind::empty, 0.0};
}

double drift_polynomial(double mortality, double plus_mass, double s) {
  return plus_mass * s * s - (plus_mass + mortality) * s + mortality;
}

PolyRootsCheck check_poly_roots(double mortality, double plus_mass, double beta) {
  if (!(plus_mass > 0.0)) throw DomainError("polynomial check needs <a+> > 0");
  PolyRootsCheck out;
  out.s = std::exp(beta);
  out.value = drift_polynomial(mortality, plus_mass, out.s);
  if (out.value < 0.0) out.epsilon = -out.value / (plus_mass + mortality);
  return out;
}

double drift_constant(double plus_mass, int order) { return plus_mass * std::ldexp(1.0, order + 1); }

double drift_lhs_poly(const Configuration& config, double mortality, double plus_mass, int order) {
  const auto n = static_cast<double>(config.size());
  if (config.empty()) return 0.0;
  const double f = std::pow(n, order);
  const double f_minus = std::pow(n - 1.0, order);
  const double f_plus = std::pow(n + 1.0, order);
  double death_weight = 0.0;
  for (const Handle& h : config.handles()) death_weight += mortality + config.competition_at(h);
  return -death_weight * (f - f_minus - 1.0) + plus_mass * n * (f_plus - f + 1.0);
}

void DriftCheck::add(const Configuration& config, double mortality, double plus_mass) {
  c = drift_constant(plus_mass, order);
  ++configs;
  const double lhs = drift_lhs_poly(config, mortality, plus_mass, order);
  const double rhs = c * std::pow(static_cast<double>(config.size()), order);
  if (lhs > rhs) ++violations;
  double ratio = 0.0;
  if (rhs > 0.0) {
    ratio = lhs / rhs;
  } else if (lhs > 0.0) {
    ratio = std::numeric_limits<double>::infinity();
  }
  max_slack_ratio = std::max(max_slack_ratio, ratio);
}

DriftCheck check_drift_poly(const SimParams& params, int order, std::span<const Configuration> configs) {
  if (order < 1) throw DomainError("drift check needs moment order >= 1");
  DriftCheck check;
  check.order = order;
  check.c = drift_constant(params.plus_mass(), order);
  for (const auto& config : configs) check.add(config, params.mortality, params.plus_mass());
  return check;
}

nlohmann::json to_json(const TheoremCase& tc) {
  return {{"claim", tc.claim},          {"status", tc.status},   {"pass", tc.passed()},
          {"inputs", tc.inputs},        {"evidence", tc.evidence}, {"tolerances", tc.tolerances}};
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

nlohmann::json model_inputs(const SimParams& p) {
  return {{"m", p.mortality},
          {"plus_mass", p.plus_mass()},
          {"competition_family", std::string(to_string(p.competition.family()))},
          {"competition_mass", p.competition.mass()},
          {"dimension", p.domain.dimension()}};
}

nlohmann::json sweep_json(const SweepResult& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"n_max", r.n_max},
                    {"t", r.t},
                    {"value", number(r.value)},
                    {"leaked", r.leaked},
                    {"relative_change", number(r.relative_change)}});
  return {{"rows", rows}, {"verdict", std::string(to_string(s.verdict))}};
}

std::optional<CountRates> count_rates_if_any(const SimParams& p, std::string& reason) {
  try {
    return build_count_rates(p);
  } catch (const NotCountDetermined& e) {
    reason = e.what();
    return std::nullopt;
  }
}

// E e^{beta |gamma_0|}; +inf when the initial law lacks that moment.
double initial_exp_moment(const InitialState& init, const Domain& domain, double beta) {
  if (init.kind == InitialState::Kind::geometric) {
    const double q = std::exp(-init.beta_star);
    if (beta >= init.beta_star) return std::numeric_limits<double>::infinity();
    return (1.0 - q) / (1.0 - q * std::exp(beta));
  }
  if (init.kind == InitialState::Kind::poisson) return std::exp(std::expm1(beta) * init.intensity * domain.volume());
  const std::size_t support = init.count_support(domain);
  return exp_moment(initial_count_distribution(init, domain, support), beta);
}

std::function<CountDistribution(std::size_t)> initial_provider(const VerifyInputs& in) {
  return [&in](std::size_t n_max) { return initial_count_distribution(in.initial, in.params.domain, n_max); };
}

}  // namespace

TheoremCase verify_moments(const VerifyInputs& in) {
  TheoremCase tc;
  tc.claim = "a";
  tc.inputs = model_inputs(in.params);
  tc.inputs["orders"] = in.schedule.orders;
  tc.inputs["times"] = in.schedule.times;
  tc.tolerances = {{"sweep_relative_change", kSweepTolerance}, {"drift_slack_ratio", 1.0}};
  bool ok = true;
  bool any_evidence = false;

  nlohmann::json drift = nlohmann::json::array();
  for (const auto& d : in.drift) {
    drift.push_back({{"order", d.order},
                     {"c", d.c},
                     {"configs", d.configs},
                     {"violations", d.violations},
                     {"max_slack_ratio", number(d.max_slack_ratio)},
                     {"holds", d.holds()}});
    ok = ok && d.holds();
    any_evidence = true;
  }
  tc.evidence["drift"] = drift;

  std::string reason;
  if (auto rates = count_rates_if_any(in.params, reason)) {
    nlohmann::json sweeps = nlohmann::json::array();
    for (int order : in.schedule.orders) {
      if (order < 1) continue;
      for (double t : in.schedule.times) {
        const SweepResult s = sweep_observable(initial_provider(in), *rates, t, in.n_max_list,
                                               [order](const CountDistribution& d) { return d.raw_moment(order); });
        nlohmann::json j = sweep_json(s);
        j["order"] = order;
        sweeps.push_back(j);
        ok = ok && s.verdict == SweepVerdict::converged;
        any_evidence = true;
      }
    }
    tc.evidence["moment_sweeps"] = sweeps;
  } else {
    tc.evidence["moment_sweeps_skipped"] = reason;
  }
  tc.status = !any_evidence ? "not_applicable" : (ok ? "pass" : "fail");
  return tc;
}

TheoremCase verify_beta_window(const VerifyInputs& in) {
  const double m = in.params.mortality;
  const double a = in.params.plus_mass();
  const BetaWindow window = beta_window(m, a);
  TheoremCase tc;
  tc.claim = window.kind == BetaWindow::Kind::all_positive ? "b1" : (window.kind == BetaWindow::Kind::interval ? "b2" : "b");
  tc.inputs = model_inputs(in.params);
  tc.inputs["betas"] = in.schedule.betas;
  tc.inputs["times"] = in.schedule.times;
  tc.tolerances = {{"sweep_relative_change", kSweepTolerance}};
  tc.evidence["window"] = {
      {"kind", window.kind == BetaWindow::Kind::all_positive ? "all_positive"
                                                             : (window.kind == BetaWindow::Kind::interval ? "interval" : "empty")},
      {"upper", number(window.upper)}};
  if (window.kind == BetaWindow::Kind::empty) {
    tc.status = "not_applicable";
    return tc;
  }

  std::string reason;
  const auto rates = count_rates_if_any(in.params, reason);
  bool ok = true;
  bool any = false;
  nlohmann::json per_beta = nlohmann::json::array();
  for (double beta : in.schedule.betas) {
    nlohmann::json entry{{"beta", beta}, {"inside_window", window.contains(beta)}};
    if (a > 0.0) {
      const PolyRootsCheck poly = check_poly_roots(m, a, beta);
      entry["poly_value"] = poly.value;
      entry["epsilon"] = poly.epsilon ? nlohmann::json(*poly.epsilon) : nlohmann::json(nullptr);
    }
    const double initial_value = initial_exp_moment(in.initial, in.params.domain, beta);
    entry["initial_exp_moment"] = number(initial_value);
    if (!window.contains(beta) || !std::isfinite(initial_value) || !rates) {
      entry["status"] = "not_applicable";
      per_beta.push_back(entry);
      continue;
    }
    // Along the chain, L e^{beta n} = n e^{beta (n-1)} P(e^beta) <= 0 inside
    // the window, so the initial value bounds the moment (growth rate c' = 0).
    const double growth = a > 0.0 ? std::max(0.0, drift_polynomial(m, a, std::exp(beta))) : 0.0;
    entry["growth_rate"] = growth;
    nlohmann::json sweeps = nlohmann::json::array();
    for (double t : in.schedule.times) {
      const SweepResult s = truncation_sweep(initial_provider(in), *rates, t, beta, in.n_max_list);
      nlohmann::json j = sweep_json(s);
      const double bound = initial_value * std::exp(growth * t);
      j["lyapunov_bound"] = number(bound);
      j["below_bound"] = s.rows.back().value <= bound * (1.0 + 1e-9);
      sweeps.push_back(j);
      ok = ok && s.verdict == SweepVerdict::converged;
      any = true;
    }
    entry["sweeps"] = sweeps;
    per_beta.push_back(entry);
  }
  tc.evidence["betas"] = per_beta;
  if (!rates) tc.evidence["sweeps_skipped"] = reason;
  tc.status = !any ? "not_applicable" : (ok ? "pass" : "fail");
  return tc;
}

TheoremCase verify_horizon(const VerifyInputs& in) {
  TheoremCase tc;
  tc.claim = "c";
  tc.inputs = model_inputs(in.params);
  tc.tolerances = {{"sweep_relative_change", kSweepTolerance}, {"asserted_fraction_of_horizon", 0.9}};
  if (!in.beta_star_hi || !in.beta_star_lo) {
    tc.status = "not_applicable";
    return tc;
  }
  const double hi = *in.beta_star_hi;
  const double lo = *in.beta_star_lo;
  tc.inputs["beta_star"] = hi;
  tc.inputs["beta_lower"] = lo;
  const Horizon T = horizon(hi, lo, in.params.plus_mass());
  tc.evidence["horizon"] = number(T.value);
  tc.evidence["initial_exp_moment_below_beta_star"] = number(initial_exp_moment(in.initial, in.params.domain, lo));
  std::string reason;
  const auto rates = count_rates_if_any(in.params, reason);
  if (T.infinite || !rates) {
    tc.evidence["skipped"] = T.infinite ? "infinite horizon (<a+> = 0)" : reason;
    tc.status = "not_applicable";
    return tc;
  }
  const SweepResult before = truncation_sweep(initial_provider(in), *rates, 0.9 * T.value, lo, in.n_max_list);
  const SweepResult after = truncation_sweep(initial_provider(in), *rates, 5.0 * T.value, lo, in.n_max_list);
  tc.evidence["before_horizon"] = sweep_json(before);
  tc.evidence["before_horizon"]["t"] = 0.9 * T.value;
  tc.evidence["after_horizon_informative"] = sweep_json(after);
  tc.evidence["after_horizon_informative"]["t"] = 5.0 * T.value;
  tc.status = before.verdict == SweepVerdict::converged ? "pass" : "fail";
  return tc;
}

std::vector<TheoremCase> verify_theorem(const VerifyInputs& in) {
  std::vector<TheoremCase> out;
  out.push_back(verify_moments(in));
  out.push_back(verify_beta_window(in));
  if (in.beta_star_hi && in.beta_star_lo) out.push_back(verify_horizon(in));
  return out;
}

}  // namespace slm
