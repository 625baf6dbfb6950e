#include "slm/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "slm/errors.hpp"

namespace slm {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Object reader that tracks consumed keys so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  // Accepts an absent or null optional key.
  void skip(const std::string& key) { seen_.insert(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(join(path_, key), "missing required key");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
    return v.get<double>();
  }

  double number(const std::string& key, double fallback) { return has(key) ? number(key) : (seen_.insert(key), fallback); }

  std::uint64_t count(const std::string& key) {
    const json& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(join(path_, key), "expected a nonnegative integer");
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    return has(key) ? count(key) : (seen_.insert(key), fallback);
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(join(path_, key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::uint64_t> counts(const std::string& key) {
    std::vector<std::uint64_t> out;
    for (double d : numbers(key)) {
      if (!(d >= 0.0) || d != std::floor(d)) throw ConfigError(join(path_, key), "expected nonnegative integers");
      out.push_back(static_cast<std::uint64_t>(d));
    }
    return out;
  }

  Section child(const std::string& key) { return Section(raw(key), join(path_, key)); }

  std::string key_path(const std::string& key) const { return join(path_, key); }
  const std::string& path() const { return path_; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(join(path_, key), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename F>
auto wrap_domain_errors(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

Kernel parse_kernel(Section s, int dim) {
  const std::string family = s.string("family");
  Kernel k = Kernel::zero(dim);
  if (family == "none") {
    k = Kernel::zero(dim);
  } else if (family == "tophat") {
    const bool by_mass = s.has("mass");
    const bool by_height = s.has("height");
    if (by_mass == by_height) throw ConfigError(s.key_path("mass"), "tophat needs exactly one of mass or height");
    const double range = s.number("range");
    if (by_mass) {
      const double mass = s.number("mass");
      k = wrap_domain_errors(s.path(), [&] { return Kernel::tophat_with_mass(dim, mass, range); });
    } else {
      const double height = s.number("height");
      k = wrap_domain_errors(s.path(), [&] { return Kernel::tophat(dim, height, range); });
    }
  } else if (family == "gaussian") {
    const double mass = s.number("mass");
    const double sigma = s.number("sigma");
    const double range = s.number("range", 0.0);
    k = wrap_domain_errors(s.path(), [&] { return Kernel::gaussian(dim, mass, sigma, range); });
  } else if (family == "exponential") {
    const double mass = s.number("mass");
    const double length = s.number("length");
    const double range = s.number("range", 0.0);
    k = wrap_domain_errors(s.path(), [&] { return Kernel::exponential(dim, mass, length, range); });
  } else if (family == "tabulated") {
    const double range = s.number("range");
    auto values = s.numbers("values");
    k = wrap_domain_errors(s.path(), [&] { return Kernel::tabulated(dim, range, std::move(values)); });
  } else {
    throw ConfigError(s.key_path("family"), "unknown kernel family '" + family + "'");
  }
  s.finish();
  return k;
}

InitialState parse_initial(Section s, int dim) {
  const std::string kind = s.string("kind");
  InitialState init;
  if (kind == "poisson") {
    init = InitialState::poisson(s.number("intensity"));
  } else if (kind == "fixed_n") {
    init = InitialState::fixed(s.count("n"));
  } else if (kind == "explicit") {
    const json& pts = s.raw("points");
    if (!pts.is_array()) throw ConfigError(s.key_path("points"), "expected an array of points");
    std::vector<std::vector<double>> points;
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != static_cast<std::size_t>(dim))
        throw ConfigError(s.key_path("points"), "each point must be an array of " + std::to_string(dim) + " numbers");
      std::vector<double> x;
      for (const auto& c : p) {
        if (!c.is_number()) throw ConfigError(s.key_path("points"), "coordinates must be numbers");
        x.push_back(c.get<double>());
      }
      points.push_back(std::move(x));
    }
    init = InitialState::explicit_list(std::move(points));
  } else if (kind == "count_law") {
    init = InitialState::count_law(s.numbers("probabilities"));
  } else if (kind == "geometric") {
    init = InitialState::geometric(s.number("beta_star"));
  } else {
    throw ConfigError(s.key_path("kind"), "unknown initial kind '" + kind + "'");
  }
  s.finish();
  return init;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  Section top(root, "");
  RunConfig cfg;

  const auto dim_raw = top.count("dimension");
  if (dim_raw < 1 || dim_raw > 16) throw ConfigError("dimension", "must be between 1 and 16");
  const int dim = static_cast<int>(dim_raw);

  {
    Section d = top.child("domain");
    const std::string geometry = d.string("geometry");
    if (geometry == "torus") {
      const double side = d.number("side");
      if (!(side > 0.0)) throw ConfigError("domain.side", "must be > 0");
      cfg.params.domain = Domain::torus(dim, side);
    } else if (geometry == "free") {
      cfg.params.domain = Domain::free_space(dim);
    } else {
      throw ConfigError("domain.geometry", "expected 'torus' or 'free'");
    }
    d.finish();
  }

  cfg.params.mortality = top.number("m");
  if (!(cfg.params.mortality >= 0.0)) throw ConfigError("m", "mortality must be >= 0");

  cfg.params.dispersal = parse_kernel(top.child("dispersal"), dim);
  if (top.has("competition")) {
    cfg.params.competition = parse_kernel(top.child("competition"), dim);
  } else {
    top.skip("competition");
    cfg.params.competition = Kernel::zero(dim);
  }
  cfg.params.validate();

  cfg.initial = parse_initial(top.child("initial"), dim);
  cfg.initial.validate(cfg.params.domain);

  {
    Section s = top.child("stop");
    if (s.has("t_end")) {
      const double t = s.number("t_end");
      if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("stop.t_end", "must be finite and >= 0");
      cfg.stop.t_end = t;
    }
    if (s.has("max_events")) cfg.stop.max_events = s.count("max_events");
    cfg.stop.population_cap = s.count("population_cap", 1'000'000);
    if (cfg.stop.population_cap == 0) throw ConfigError("stop.population_cap", "must be >= 1");
    if (!cfg.stop.t_end && !cfg.stop.max_events) throw ConfigError("stop", "needs t_end or max_events");
    s.finish();
  }

  cfg.replicas = top.count("replicas", 1);
  if (cfg.replicas == 0) throw ConfigError("replicas", "must be >= 1");
  cfg.seed = top.count("seed", 0);

  {
    Section s = top.child("observables");
    cfg.schedule.times = s.numbers("times");
    if (s.has("orders")) {
      for (auto o : s.counts("orders")) cfg.schedule.orders.push_back(static_cast<int>(o));
    } else {
      s.skip("orders");
    }
    if (s.has("betas")) {
      cfg.schedule.betas = s.numbers("betas");
    } else {
      s.skip("betas");
    }
    s.finish();
    cfg.schedule.validate();
    if (cfg.stop.t_end && cfg.schedule.times.back() > *cfg.stop.t_end)
      throw ConfigError("observables.times", "observation times must not exceed stop.t_end");
  }

  if (top.has("master")) {
    Section s = top.child("master");
    cfg.master.n_max = s.count("n_max", cfg.master.n_max);
    if (s.has("n_max_sweep")) {
      for (auto n : s.counts("n_max_sweep")) cfg.master.n_max_sweep.push_back(n);
      for (std::size_t i = 1; i < cfg.master.n_max_sweep.size(); ++i)
        if (cfg.master.n_max_sweep[i] <= cfg.master.n_max_sweep[i - 1])
          throw ConfigError("master.n_max_sweep", "must be strictly increasing");
    }
    cfg.master.rel_tol = s.number("rel_tol", cfg.master.rel_tol);
    if (!(cfg.master.rel_tol > 0.0)) throw ConfigError("master.rel_tol", "must be > 0");
    s.finish();
  }

  if (top.has("verify")) {
    Section s = top.child("verify");
    if (s.has("beta_star")) cfg.verify.beta_star = s.number("beta_star");
    if (s.has("beta_lower")) cfg.verify.beta_lower = s.number("beta_lower");
    if (cfg.verify.beta_star.has_value() != cfg.verify.beta_lower.has_value())
      throw ConfigError("verify.beta_lower", "beta_star and beta_lower must be given together");
    if (cfg.verify.beta_star && !(0.0 < *cfg.verify.beta_lower && *cfg.verify.beta_lower < *cfg.verify.beta_star))
      throw ConfigError("verify.beta_lower", "need 0 < beta_lower < beta_star");
    if (s.has("drift_orders")) {
      cfg.verify.drift_orders.clear();
      for (auto o : s.counts("drift_orders")) {
        if (o < 1) throw ConfigError("verify.drift_orders", "orders must be >= 1");
        cfg.verify.drift_orders.push_back(static_cast<int>(o));
      }
    }
    s.finish();
  }

  if (top.has("diagnostics")) {
    Section s = top.child("diagnostics");
    cfg.diagnostics.samples = s.count("samples", cfg.diagnostics.samples);
    cfg.diagnostics.bins = static_cast<int>(s.count("bins", static_cast<std::uint64_t>(cfg.diagnostics.bins)));
    if (cfg.diagnostics.samples == 0) throw ConfigError("diagnostics.samples", "must be >= 1");
    if (cfg.diagnostics.bins < 1) throw ConfigError("diagnostics.bins", "must be >= 1");
    s.finish();
  }

  if (top.has("output")) cfg.output_dir = top.string("output");
  top.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace slm
