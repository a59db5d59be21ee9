#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "qd/experiments.hpp"

using namespace qd;

namespace {

json without_wall_time(json report) {
  report["resources"].erase("wall_time_s");
  return report;
}

}  // namespace

TEST_CASE("catalog contains the required experiments") {
  std::vector<std::string> names;
  for (const auto& e : experiment_catalog()) {
    names.push_back(e.name);
    CHECK(!e.topic.empty());
    CHECK(!e.description.empty());
    CHECK(e.defaults.at("experiment") == e.name);
    CHECK(e.defaults.at("seed") == 0);
    // Defaults resolve on their own.
    CHECK_NOTHROW(resolve_config(e.defaults, json::object()));
  }
  for (const char* required : {"ground-state", "interferometry-flux", "interferometry-charge", "toffoli",
                               "toffoli-truth-table", "group-irreps", "anyon-spectrum", "sparse-dense-oracle",
                               "magnetic-lifecycle", "w-r2", "backend-equivalence", "clifford-gates",
                               "toffoli-repair", "fusion-channels"})
    CHECK(std::find(names.begin(), names.end(), required) != names.end());
  CHECK(find_experiment("ground-state") != nullptr);
  CHECK(find_experiment("nope") == nullptr);
}

TEST_CASE("unknown names and fields are rejected") {
  CHECK(nearest_experiments("groundstate").front() == "ground-state");
  CHECK(nearest_experiments("tofoli", 1) == std::vector<std::string>{"toffoli"});
  try {
    resolve_config({{"experiment", "interferometry-flx"}}, json::object());
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("interferometry-flux") != std::string::npos);
  }
  CHECK_THROWS_AS(resolve_config({{"experiment", "ground-state"}, {"colour", "red"}}, json::object()), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"experiment", "ground-state"}, {"params", {{"sites", 3}}}}, json::object()),
                  ConfigError);
  CHECK_THROWS_AS(resolve_config({{"experiment", "ground-state"}, {"rows", 0}}, json::object()), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"experiment", "ground-state"}, {"policy", "maybe"}}, json::object()), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"experiment", "ground-state"}, {"group", "q8"}}, json::object()), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"experiment", "ground-state"}, {"rows", "two"}}, json::object()), ConfigError);
  CHECK_THROWS_AS(resolve_config(json::object(), json::object()), ConfigError);
}

TEST_CASE("flags override file fields; seed defaults to zero") {
  const json file = {{"experiment", "ground-state"}, {"group", "z2"}, {"rows", 2}, {"cols", 2}, {"seed", 4}};
  const json cfg = resolve_config(file, {{"rows", 1}, {"params", json::object()}});
  CHECK(cfg.at("rows") == 1);
  CHECK(cfg.at("cols") == 2);
  CHECK(cfg.at("group") == "z2");
  CHECK(cfg.at("seed") == 4);
  CHECK(resolve_config({{"experiment", "ground-state"}}, json::object()).at("seed") == 0);
  CHECK(resolve_config({{"experiment", "toffoli"}}, {{"params", {{"a", 2}}}}).at("params").at("b") == 2);
  CHECK(resolve_config({{"experiment", "toffoli"}}, json::object()).at("max_support") == kDefaultMaxSupport);
}

TEST_CASE("reports are deterministic apart from wall time") {
  for (const json& overrides : {json{{"experiment", "ground-state"}, {"group", "s3"}, {"rows", 1}, {"cols", 2}},
                                json{{"experiment", "toffoli"}, {"seed", 9}},
                                json{{"experiment", "sparse-dense-oracle"}, {"seed", 3}}}) {
    const json cfg = resolve_config(json::object(), overrides);
    const json a = run_experiment(cfg), b = run_experiment(cfg);
    CHECK(a.at("pass").get<bool>());
    CHECK(a.at("resources").contains("wall_time_s"));
    CHECK(without_wall_time(a) == without_wall_time(b));
    for (const char* key : {"config", "results", "checks", "resources", "pass"}) CHECK(a.contains(key));
  }
}

TEST_CASE("seeds change sampled outcomes") {
  json a = run_experiment(resolve_config(json::object(), {{"experiment", "toffoli"}, {"seed", 1}}));
  json b = run_experiment(resolve_config(json::object(), {{"experiment", "toffoli"}, {"seed", 2}}));
  CHECK(a.at("pass").get<bool>());
  CHECK(b.at("pass").get<bool>());
  CHECK(a.at("results") != b.at("results"));
}

TEST_CASE("support cap refuses oversized configurations") {
  const json big = resolve_config(json::object(), {{"experiment", "ground-state"}, {"rows", 3}, {"cols", 3}});
  CHECK_THROWS_AS(run_experiment(big), ResourceLimitExceeded);
  const json small = resolve_config(json::object(), {{"experiment", "ground-state"}, {"max_support", 10}});
  CHECK_THROWS_AS(run_experiment(small), ResourceLimitExceeded);
}

TEST_CASE("checks carry their tolerance and flagged values pass") {
  const json r = run_experiment(resolve_config(json::object(), {{"experiment", "fusion-channels"},
                                                                {"params", {{"lattice", false}}}}));
  CHECK(r.at("pass").get<bool>());
  int flagged = 0;
  for (const auto& c : r.at("checks")) {
    CHECK(c.contains("name"));
    CHECK(c.contains("pass"));
    if (c.value("flagged", false)) {
      ++flagged;
      CHECK(c.at("quoted") == 0.5);
      CHECK(c.at("value").get<double>() == doctest::Approx(0.25));
    }
  }
  CHECK(flagged == 2);
}

TEST_CASE("batch results equal sequential results") {
  std::vector<json> configs = {
      resolve_config(json::object(), {{"experiment", "group-irreps"}}),
      resolve_config(json::object(), {{"experiment", "clifford-gates"}, {"seed", 5}}),
      resolve_config(json::object(), {{"experiment", "ground-state"}, {"group", "z2"}, {"rows", 2}, {"cols", 2}}),
      resolve_config(json::object(), {{"experiment", "ground-state"}, {"rows", 3}, {"cols", 3}}),
  };
  const auto batch = run_batch(configs, 3);
  REQUIRE(batch.size() == configs.size());
  for (size_t i = 0; i + 1 < configs.size(); ++i)
    CHECK(without_wall_time(batch[i]) == without_wall_time(run_experiment(configs[i])));
  // The oversized entry becomes an error report instead of aborting the batch.
  CHECK(batch.back().contains("error"));
  CHECK(!batch.back().at("pass").get<bool>());
}
