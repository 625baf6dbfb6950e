#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slm/errors.hpp"
#include "slm/master_equation.hpp"
#include "slm/output.hpp"
#include "slm/run_config.hpp"
#include "slm/stats.hpp"
#include "slm/verify.hpp"

namespace {

using Files = std::map<std::string, std::string>;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
  unsigned threads = 1;
  std::string kernel = "dispersal";
};

slm::InitialSampler sampler_for(const slm::RunConfig& cfg) {
  return [&cfg](slm::RandomStream& rng) { return slm::sample_initial(cfg.initial, cfg.params, rng); };
}

Files simulate(const slm::RunConfig& cfg, unsigned threads) {
  Files files;
  const int dim = cfg.params.domain.dimension();

  // Replica 0 is also recorded event by event.
  slm::RandomStream rng = slm::RandomStream::for_replica(cfg.seed, 0);
  slm::Configuration start = slm::sample_initial(cfg.initial, cfg.params, rng);
  const slm::Trajectory traj = slm::run(cfg.params, std::move(start), cfg.stop, rng, cfg.schedule.times);
  std::ostringstream t;
  slm::write_trajectory_csv(t, traj, dim);
  files["trajectory.csv"] = t.str();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    std::ostringstream s;
    slm::write_snapshot_csv(s, traj.snapshots[k], dim);
    files["snapshot_" + std::to_string(k) + ".csv"] = s.str();
  }

  slm::EnsembleOptions opts;
  opts.threads = threads;
  opts.population_cap = cfg.stop.population_cap;
  const auto acc = slm::run_ensemble(cfg.params, sampler_for(cfg), cfg.replicas, cfg.seed, cfg.schedule, opts);
  std::ostringstream m;
  slm::write_moment_csv(m, slm::make_report(acc, cfg.schedule));
  files["moments.csv"] = m.str();

  nlohmann::ordered_json summary{{"seed", cfg.seed},
                                 {"replicas", acc.replicas},
                                 {"truncated_replicas", acc.truncated},
                                 {"events", acc.stats.events},
                                 {"births", acc.stats.births},
                                 {"deaths", acc.stats.deaths},
                                 {"coincidence_resamples", acc.stats.coincidence_resamples},
                                 {"drift_refreshes", acc.stats.drift_refreshes},
                                 {"max_drift", acc.stats.max_drift},
                                 {"trajectory_stop_reason", slm::to_string(traj.reason)},
                                 {"trajectory_end_time", traj.end_time}};
  files["summary.json"] = summary.dump(2) + "\n";
  return files;
}

Files master(const slm::RunConfig& cfg) {
  Files files;
  const slm::CountRates rates = slm::build_count_rates(cfg.params);
  const std::size_t n_max = cfg.master.n_max;
  const std::size_t support = cfg.initial.count_support(cfg.params.domain);
  if (support > n_max)
    throw slm::TruncationError("initial count support reaches " + std::to_string(support) + ", above Nmax = " +
                               std::to_string(n_max));
  slm::EvolveOptions opts;
  opts.rel_tol = cfg.master.rel_tol;

  const auto p0 = slm::initial_count_distribution(cfg.initial, cfg.params.domain, n_max);
  const auto sol = slm::evolve(p0, rates, cfg.schedule.times, n_max, opts);
  std::vector<slm::TimedDistribution> series;
  for (std::size_t k = 0; k < sol.size(); ++k) series.push_back({cfg.schedule.times[k], sol[k]});
  std::ostringstream d;
  slm::write_distribution_csv(d, series);
  files["distribution.csv"] = d.str();

  if (!cfg.master.n_max_sweep.empty() && !cfg.schedule.betas.empty()) {
    auto initial = [&cfg](std::size_t n) { return slm::initial_count_distribution(cfg.initial, cfg.params.domain, n); };
    std::vector<slm::LabelledSweep> sweeps;
    for (double beta : cfg.schedule.betas)
      for (double t : cfg.schedule.times)
        sweeps.push_back({beta, slm::truncation_sweep(initial, rates, t, beta, cfg.master.n_max_sweep, opts)});
    std::ostringstream s;
    slm::write_sweep_csv(s, sweeps);
    files["sweep.csv"] = s.str();
  }
  return files;
}

Files verify(const slm::RunConfig& cfg, unsigned threads) {
  slm::VerifyInputs in;
  in.params = cfg.params;
  in.initial = cfg.initial;
  in.schedule = cfg.schedule;
  if (!cfg.master.n_max_sweep.empty()) in.n_max_list = cfg.master.n_max_sweep;
  in.beta_star_hi = cfg.verify.beta_star;
  in.beta_star_lo = cfg.verify.beta_lower;

  for (int order : cfg.verify.drift_orders) {
    slm::DriftCheck check;
    check.order = order;
    check.c = slm::drift_constant(cfg.params.plus_mass(), order);
    in.drift.push_back(check);
  }
  slm::EnsembleOptions opts;
  opts.threads = threads;
  opts.population_cap = cfg.stop.population_cap;
  opts.observer = [&](std::uint64_t, std::size_t, const slm::Configuration& config) {
    for (auto& check : in.drift) check.add(config, cfg.params.mortality, cfg.params.plus_mass());
  };
  slm::run_ensemble(cfg.params, sampler_for(cfg), cfg.replicas, cfg.seed, cfg.schedule, opts);

  nlohmann::json cases = nlohmann::json::array();
  for (const auto& tc : slm::verify_theorem(in)) cases.push_back(slm::to_json(tc));
  return Files{{"verify.json", cases.dump(2) + "\n"}};
}

Files sample_kernel(const slm::RunConfig& cfg, const std::string& which) {
  const slm::Kernel& kernel = which == "competition" ? cfg.params.competition : cfg.params.dispersal;
  if (kernel.is_zero()) throw slm::ConfigError(which, "cannot sample a zero kernel");
  slm::RandomStream rng(cfg.seed);
  const std::size_t n = cfg.diagnostics.samples;
  const int bins = cfg.diagnostics.bins;
  const double range = kernel.range();

  std::vector<double> radii(n);
  std::vector<double> observed(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> disp(static_cast<std::size_t>(kernel.dimension()));
  for (std::size_t i = 0; i < n; ++i) {
    kernel.sample_displacement(rng, disp);
    double r2 = 0.0;
    for (double c : disp) r2 += c * c;
    radii[i] = std::sqrt(r2);
    const auto b = std::min(static_cast<int>(radii[i] / range * bins), bins - 1);
    observed[static_cast<std::size_t>(b)] += 1.0;
  }
  std::vector<double> expected(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b)
    expected[static_cast<std::size_t>(b)] =
        kernel.radial_cdf(range * (b + 1) / bins) - kernel.radial_cdf(range * b / bins);

  std::ostringstream h;
  h << "bin,r_lo,r_hi,observed,expected\n";
  for (int b = 0; b < bins; ++b) {
    const auto i = static_cast<std::size_t>(b);
    h << b << ',' << slm::format_double(range * b / bins) << ',' << slm::format_double(range * (b + 1) / bins) << ','
      << static_cast<std::uint64_t>(observed[i]) << ',' << slm::format_double(expected[i] * static_cast<double>(n))
      << '\n';
  }
  const auto chi = slm::stats::chi_square_test(observed, expected);
  const auto ks = slm::stats::ks_test(radii, [&](double r) { return kernel.radial_cdf(r); });
  nlohmann::ordered_json report{
      {"kernel", which},
      {"family", slm::to_string(kernel.family())},
      {"samples", n},
      {"chi_square", {{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}}},
      {"ks", {{"statistic", ks.statistic}, {"p_value", ks.p_value}}}};
  return Files{{"kernel_histogram.csv", h.str()}, {"kernel_tests.json", report.dump(2) + "\n"}};
}

void write_all(const std::string& dir, const Files& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) slm::write_file_atomic((std::filesystem::path(dir) / name).string(), content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial logistic birth-death simulator and moment verifier"};
  app.require_subcommand(1);
  Overrides ov;

  auto add_common = [&ov](CLI::App* sub) {
    sub->add_option("--config", ov.config, "Run config (JSON)")->required();
    sub->add_option("--out", ov.out, "Output directory (overrides config)");
    sub->add_option("--seed", ov.seed, "Base seed (overrides config)");
    sub->add_option("--replicas", ov.replicas, "Replica count (overrides config)");
    sub->add_option("--threads", ov.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* sim = app.add_subcommand("simulate", "Run replicas, write trajectory and moment CSVs");
  auto* mas = app.add_subcommand("master", "Solve the count master equation");
  auto* ver = app.add_subcommand("verify", "Check the moment theorem claims");
  auto* sk = app.add_subcommand("sample-kernel", "Sample a kernel and test it against its law");
  for (auto* sub : {sim, mas, ver, sk}) add_common(sub);
  sk->add_option("--kernel", ov.kernel, "dispersal or competition")
      ->check(CLI::IsMember({"dispersal", "competition"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    slm::RunConfig cfg = slm::load_config(ov.config);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.replicas) {
      if (*ov.replicas == 0) throw slm::ConfigError("replicas", "must be >= 1");
      cfg.replicas = *ov.replicas;
    }
    const std::string dir = ov.out.empty() ? cfg.output_dir : ov.out;

    Files files;
    if (sim->parsed()) files = simulate(cfg, ov.threads);
    else if (mas->parsed()) files = master(cfg);
    else if (ver->parsed()) files = verify(cfg, ov.threads);
    else files = sample_kernel(cfg, ov.kernel);
    write_all(dir, files);
    return 0;
  } catch (const slm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const slm::NumericalDriftError& e) {
    std::cerr << "numerical drift: " << e.what() << '\n';
    return 2;
  } catch (const slm::TruncationError& e) {
    std::cerr << "truncation: " << e.what() << '\n';
    return 2;
  } catch (const slm::CoincidenceError& e) {
    std::cerr << "coincidence: " << e.what() << '\n';
    return 2;
  } catch (const slm::NotCountDetermined& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
