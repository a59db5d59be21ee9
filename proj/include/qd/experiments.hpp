// Named experiments: configuration handling, the experiment catalog and the
// JSON reports produced by the command-line runner.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qd {

using json = nlohmann::json;

// Invalid configuration: unknown field, unknown experiment, bad value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The configuration's worst-case support exceeds the cap.
class ResourceLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentInfo {
  std::string name;
  std::string topic;        // what the experiment reproduces
  std::string description;
  json defaults;            // full default configuration (common + params)
};

inline constexpr uint64_t kDefaultMaxSupport = 10000000;

const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo* find_experiment(const std::string& name);
// Catalog names ordered by edit distance to `name` (closest first).
std::vector<std::string> nearest_experiments(const std::string& name, size_t count = 3);

// Merges defaults <- file <- overrides and validates the result.  Common fields:
// experiment, group, rows, cols, policy, seed, tol, out, max_support, params.
// Unknown fields (top level or inside params) raise ConfigError.
json resolve_config(const json& file, const json& overrides);

// Runs one resolved configuration.  The report has the keys config, results,
// checks, resources and pass; only resources.wall_time_s varies between runs
// of the same configuration.
json run_experiment(const json& config);

// Runs every configuration on its own thread; failures become error reports.
std::vector<json> run_batch(const std::vector<json>& configs, int threads = 0);

}  // namespace qd
