// qdsim: command-line runner for the named experiments.
//
//   qdsim list
//   qdsim run --experiment ground-state --group s3 --rows 2 --cols 2
//   qdsim run --config cfg.json --seed 7 --out report.json
//   qdsim batch --config configs.json --threads 4 --out reports.json
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 for
// configuration, resource-limit or runtime errors.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qd/experiments.hpp"

namespace {

using qd::json;

struct Overrides {
  std::string config_path, experiment, group, policy, out;
  std::optional<int> rows, cols;
  std::optional<uint64_t> seed, max_support;
  std::optional<double> tol;
  std::vector<std::string> params;  // key=value, value parsed as JSON when possible
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--experiment", o.experiment, "experiment name (see 'qdsim list')");
  cmd->add_option("--group", o.group, "group: s3, z2, z3, ...");
  cmd->add_option("--rows", o.rows, "lattice rows (faces)");
  cmd->add_option("--cols", o.cols, "lattice columns (faces)");
  cmd->add_option("--policy", o.policy, "outcome policy")->check(CLI::IsMember({"sample", "postselect", "enumerate"}));
  cmd->add_option("--seed", o.seed, "random seed (default 0)");
  cmd->add_option("--tol", o.tol, "tolerance for checks");
  cmd->add_option("--out", o.out, "write the report to this path");
  cmd->add_option("--max-support", o.max_support, "worst-case support cap (default 1e7)");
  cmd->add_option("--param", o.params, "experiment parameter key=value (repeatable)");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qd::ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw qd::ConfigError(path + ": " + e.what());
  }
}

json flag_overrides(const Overrides& o) {
  json j = json::object();
  if (!o.experiment.empty()) j["experiment"] = o.experiment;
  if (!o.group.empty()) j["group"] = o.group;
  if (!o.policy.empty()) j["policy"] = o.policy;
  if (!o.out.empty()) j["out"] = o.out;
  if (o.rows) j["rows"] = *o.rows;
  if (o.cols) j["cols"] = *o.cols;
  if (o.seed) j["seed"] = *o.seed;
  if (o.tol) j["tol"] = *o.tol;
  if (o.max_support) j["max_support"] = *o.max_support;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw qd::ConfigError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json parsed = json::parse(val, nullptr, false);
    j["params"][key] = parsed.is_discarded() ? json(val) : parsed;
  }
  return j;
}

void write_report(const json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw qd::ConfigError("cannot write " + path);
  out << text;
}

void print_summary(const json& report, std::ostream& os) {
  const std::string name = report.at("config").value("experiment", "?");
  if (report.contains("error")) {
    os << name << ": ERROR " << report.at("error").get<std::string>() << "\n";
    return;
  }
  os << name << ": " << (report.at("pass").get<bool>() ? "PASS" : "FAIL");
  for (const auto& c : report.at("checks"))
    if (!c.at("pass").get<bool>()) os << "\n  failed: " << c.at("name").get<std::string>();
  os << "\n";
}

int cmd_list() {
  for (const auto& e : qd::experiment_catalog()) {
    std::cout << e.name << "\n  topic: " << e.topic << "\n  " << e.description << "\n  defaults: "
              << e.defaults.dump() << "\n";
  }
  return 0;
}

int cmd_run(const Overrides& o) {
  const json file = o.config_path.empty() ? json::object() : read_json_file(o.config_path);
  const json cfg = qd::resolve_config(file, flag_overrides(o));
  const json report = qd::run_experiment(cfg);
  write_report(report, cfg.at("out").get<std::string>());
  print_summary(report, std::cerr);
  return report.at("pass").get<bool>() ? 0 : 1;
}

int cmd_batch(const Overrides& o, int threads) {
  if (o.config_path.empty()) throw qd::ConfigError("batch needs --config with a JSON array of configurations");
  const json file = read_json_file(o.config_path);
  if (!file.is_array()) throw qd::ConfigError("batch configuration must be a JSON array");
  json flags = flag_overrides(o);
  const std::string combined_out = flags.value("out", "");
  flags.erase("out");  // per-config outputs come from the entries themselves
  std::vector<json> configs;
  for (const auto& entry : file) configs.push_back(qd::resolve_config(entry, flags));
  const auto reports = qd::run_batch(configs, threads);
  bool all = true;
  json combined = json::array();
  for (size_t i = 0; i < reports.size(); ++i) {
    const std::string path = configs[i].at("out").get<std::string>();
    if (!path.empty()) write_report(reports[i], path);
    combined.push_back(reports[i]);
    print_summary(reports[i], std::cerr);
    all = all && reports[i].at("pass").get<bool>();
  }
  if (!combined_out.empty() || std::none_of(configs.begin(), configs.end(), [](const json& c) {
        return !c.at("out").get<std::string>().empty();
      }))
    write_report(combined, combined_out);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-double lattice simulator: experiment runner"};
  app.require_subcommand(1);
  Overrides run_o, batch_o;
  int threads = 0;
  auto* list = app.add_subcommand("list", "list the experiment catalog");
  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run, run_o);
  auto* batch = app.add_subcommand("batch", "run a JSON array of configurations in parallel");
  add_common(batch, batch_o);
  batch->add_option("--threads", threads, "worker threads (default: hardware concurrency)");
  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) return cmd_list();
    if (run->parsed()) return cmd_run(run_o);
    if (batch->parsed()) return cmd_batch(batch_o, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
