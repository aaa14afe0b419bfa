// mcsim command line: simulate, predict, measure, asymptote, threshold-sweep.
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "handles.hpp"

namespace {

using namespace mcsim_cli;
using Command = std::function<CommandResult(const ExperimentConfig&, std::ostream&)>;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> realizations;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> algorithm;
  std::vector<double> xi;
  // asymptote only
  std::optional<std::string> radius;
  std::optional<std::string> distance;
  std::optional<double> tol;
  std::optional<int> n_max;
};

void add_common(CLI::App* sub, Overrides& o, bool needs_config) {
  auto* cfg = sub->add_option("--config", o.config_path, "JSON experiment file")->check(CLI::ExistingFile);
  if (needs_config) cfg->required();
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--realizations", o.realizations, "independent realizations")->check(CLI::PositiveNumber);
  sub->add_option("--workers", o.workers, "parallel realization workers")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "CSV output path (stdout if omitted)");
  sub->add_option("--algorithm", o.algorithm, "smc | rmc | line | apmc");
  sub->add_option("--xi", o.xi, "likelihood threshold (comma-separated list for threshold-sweep)")
      ->delimiter(',');
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.realizations) c.realizations = *o.realizations;
  if (o.workers) c.workers = *o.workers;
  if (o.out) c.output = *o.out;
  if (o.algorithm) c.algorithm = *o.algorithm;
  if (!o.xi.empty()) {
    for (double v : o.xi)
      if (v < 0.0 || v >= 1.0) throw ConfigError("--xi: values must lie in [0, 1)");
    c.xi = o.xi;
  }
  if (o.radius || o.distance || o.tol || o.n_max) {
    AsymptoteConfig a = c.asymptote.value_or(AsymptoteConfig{});
    if (o.radius) a.radius = parse_quantity(*o.radius, Dimension::Length, "--radius");
    if (o.distance) a.distance = parse_quantity(*o.distance, Dimension::Length, "--distance");
    if (o.tol) a.tol = *o.tol;
    if (o.n_max) a.n_max = *o.n_max;
    if (!(a.radius > 0.0)) throw ConfigError("--radius: must be positive");
    if (!(a.distance > a.radius)) throw ConfigError("--distance: must exceed the radius");
    c.asymptote = a;
  }
  return c;
}

int execute(const Command& command, const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  if (config.output.empty()) {
    result = command(config, std::cout);
    std::cout.flush();
  } else {
    std::ofstream csv(config.output);
    if (!csv) throw std::runtime_error(config.output + ": cannot open for writing");
    result = command(config, csv);
    csv.close();
    if (!csv) throw std::runtime_error(config.output + ": write failed");
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest_path_for(config.output), config, result.ledger, elapsed);
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle simulation of diffusing molecules absorbed by spherical receivers"};
  app.set_version_flag("--version", std::string(mcsim_version()));
  app.require_subcommand(1);

  std::map<std::string, Command> commands{{"simulate", cmd_simulate},
                                          {"predict", cmd_predict},
                                          {"measure", cmd_measure},
                                          {"asymptote", cmd_asymptote},
                                          {"threshold-sweep", cmd_threshold_sweep}};
  const std::map<std::string, std::string> help{
      {"simulate", "cumulative absorbed fraction per receiver over time"},
      {"predict", "kappa and predicted one-step R^2 over a channel grid"},
      {"measure", "measured one-step R^2 and RMSE over a channel grid"},
      {"asymptote", "asymptotic per-receiver capture for two receivers"},
      {"threshold-sweep", "variate counts and R^2 versus the likelihood threshold"}};

  Overrides o;
  for (const auto& [name, _] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, o, name != "asymptote");
    if (name == "asymptote") {
      sub->add_option("--radius", o.radius, "receiver radius, e.g. \"40 um\"");
      sub->add_option("--distance", o.distance, "transmitter to receiver center, e.g. \"100 um\"");
      sub->add_option("--tol", o.tol, "series truncation tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--n-max", o.n_max, "maximum series terms")->check(CLI::PositiveNumber);
    }
  }

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return execute(commands.at(name), resolve(o));
  } catch (const ConfigError& e) {
    std::cerr << "mcsim " << name << ": config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "mcsim " << name << ": " << e.what() << '\n';
    return kExitFailure;
  }
}
