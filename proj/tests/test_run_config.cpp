#include <string>

#include "doctest.h"
#include "json.hpp"
#include "slm/errors.hpp"
#include "slm/run_config.hpp"

using namespace slm;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "dimension": 1,
    "domain": {"geometry": "torus", "side": 10},
    "m": 1,
    "dispersal": {"family": "tophat", "mass": 0.5, "range": 1},
    "initial": {"kind": "fixed_n", "n": 20},
    "stop": {"t_end": 2},
    "observables": {"times": [0.5, 1, 2]}
  })");
}

std::string error_key(const json& j) {
  try {
    parse_config(j.dump());
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("minimal contact-model config") {
  const RunConfig c = parse_config(minimal().dump());
  CHECK(c.params.mortality == 1.0);
  CHECK(c.params.plus_mass() == doctest::Approx(0.5));
  CHECK(c.params.competition.is_zero());
  CHECK(c.initial.kind == InitialState::Kind::fixed_n);
  CHECK(c.replicas == 1);
  CHECK(c.seed == 0);
  CHECK(*c.stop.t_end == 2.0);
  CHECK(c.schedule.times.size() == 3);
  CHECK(c.output_dir == "out");
}

TEST_CASE("full config") {
  json j = minimal();
  j["competition"] = {{"family", "tophat"}, {"height", 0.05}, {"range", 5}};
  j["replicas"] = 100;
  j["seed"] = 18446744073709551615ULL;
  j["observables"]["orders"] = {1, 2};
  j["observables"]["betas"] = {0.5};
  j["master"] = {{"n_max", 300}, {"n_max_sweep", {100, 200}}, {"rel_tol", 1e-9}};
  j["verify"] = {{"beta_star", 1.0}, {"beta_lower", 0.5}, {"drift_orders", {1, 2}}};
  j["diagnostics"] = {{"samples", 1000}, {"bins", 10}};
  j["output"] = "runs/a";
  const RunConfig c = parse_config(j.dump());
  CHECK(c.params.competition.peak() == 0.05);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.master.n_max_sweep.size() == 2);
  CHECK(*c.verify.beta_lower == 0.5);
  CHECK(c.verify.drift_orders.size() == 2);
  CHECK(c.output_dir == "runs/a");
}

TEST_CASE("every kernel family parses") {
  json j = minimal();
  j["dimension"] = 2;
  j["domain"]["side"] = 12;
  j["initial"] = {{"kind", "explicit"}, {"points", {{1, 2}, {3, 4}}}};
  for (const json& k : {json{{"family", "gaussian"}, {"mass", 1}, {"sigma", 0.5}, {"range", 4}},
                        json{{"family", "exponential"}, {"mass", 1}, {"length", 0.1}, {"range", 4}},
                        json{{"family", "tabulated"}, {"range", 2}, {"values", {1, 0.5, 0}}},
                        json{{"family", "none"}}}) {
    j["dispersal"] = k;
    CAPTURE(k.dump());
    CHECK_NOTHROW(parse_config(j.dump()));
  }
}

TEST_CASE("validation errors name the key") {
  json j = minimal();
  j["m"] = -1;
  CHECK(error_key(j) == "m");

  j = minimal();
  j["foo"] = 1;
  CHECK(error_key(j) == "foo");

  j = minimal();
  j["dispersal"]["colour"] = "red";
  CHECK(error_key(j) == "dispersal.colour");

  j = minimal();
  j.erase("m");
  CHECK(error_key(j) == "m");

  j = minimal();
  j["m"] = "one";
  CHECK(error_key(j) == "m");

  j = minimal();
  j["domain"]["side"] = 7;
  j["dispersal"]["range"] = 2;
  CHECK(error_key(j) == "domain.side");

  j = minimal();
  j["dispersal"]["range"] = 6;
  j["domain"]["side"] = 12;
  CHECK(error_key(j) == "dispersal.range");

  j = minimal();
  j["dispersal"]["height"] = 1;
  CHECK(error_key(j) == "dispersal.mass");

  j = minimal();
  j["dispersal"]["family"] = "cauchy";
  CHECK(error_key(j) == "dispersal.family");

  j = minimal();
  j["dispersal"] = {{"family", "gaussian"}, {"mass", 1}, {"sigma", 0.5}, {"range", 1}};
  CHECK(error_key(j) == "dispersal");

  j = minimal();
  j["observables"]["times"] = {1, 0.5};
  CHECK(error_key(j) == "observables.times");

  j = minimal();
  j["observables"]["times"] = {3};
  CHECK(error_key(j) == "observables.times");

  j = minimal();
  j["stop"] = json::object();
  CHECK(error_key(j) == "stop");

  j = minimal();
  j["initial"] = {{"kind", "poisson"}, {"intensity", -2}};
  CHECK(error_key(j) == "initial.intensity");

  j = minimal();
  j["domain"] = {{"geometry", "free"}};
  CHECK(error_key(j) == "initial.kind");

  j = minimal();
  j["replicas"] = 0;
  CHECK(error_key(j) == "replicas");

  j = minimal();
  j["replicas"] = 2.5;
  CHECK(error_key(j) == "replicas");

  j = minimal();
  j["verify"] = {{"beta_star", 1.0}};
  CHECK(error_key(j) == "verify.beta_lower");

  j = minimal();
  j["master"] = {{"n_max_sweep", {200, 100}}};
  CHECK(error_key(j) == "master.n_max_sweep");

  j = minimal();
  j["dimension"] = 0;
  CHECK(error_key(j) == "dimension");
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("[]"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
