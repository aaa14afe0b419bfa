#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <vector>

#include "handles.hpp"

namespace mcsim_cli {
namespace {

mcsim_policy make_policy(const ExperimentConfig& c, double xi) {
  mcsim_policy policy{};
  const mcsim_status st = mcsim_algorithm_from_name(c.algorithm.c_str(), &policy.algorithm);
  if (st != MCSIM_OK) throw ConfigError("policy.algorithm: " + std::string(mcsim_last_error()));
  policy.xi = xi;
  return policy;
}

double single_xi(const ExperimentConfig& c) {
  if (c.xi.size() != 1) throw ConfigError("policy.xi: this command takes a single value");
  return c.xi.front();
}

mcsim_run_options run_options(const ExperimentConfig& c) {
  return {c.seed, c.realizations, c.workers};
}

const SceneConfig& need_scene(const ExperimentConfig& c) {
  if (!c.scene) throw ConfigError("scene: required by this command");
  return *c.scene;
}

const ChannelGrid& need_channel(const ExperimentConfig& c) {
  if (!c.channel) throw ConfigError("channel: required by this command");
  return *c.channel;
}

ScenePtr build_scene(const SceneConfig& s) {
  mcsim_scene* raw = nullptr;
  check(mcsim_scene_create(s.diffusion, s.time_step, s.samples, s.molecules, &raw));
  ScenePtr scene(raw);
  check(mcsim_scene_set_transmitter(scene.get(), s.transmitter[0], s.transmitter[1],
                                    s.transmitter[2]));
  for (const auto& rx : s.receivers)
    check(mcsim_scene_add_receiver(scene.get(), rx.center[0], rx.center[1], rx.center[2],
                                   rx.radius, nullptr));
  check(mcsim_scene_validate(scene.get()));
  return scene;
}

double center_distance(const SceneConfig& s, const ReceiverSpec& rx) {
  return std::hypot(rx.center[0] - s.transmitter[0], rx.center[1] - s.transmitter[1],
                    rx.center[2] - s.transmitter[2]);
}

std::vector<double> analytic_curve(const SceneConfig& s, const std::vector<double>& times) {
  const auto& rx = s.receivers.front();
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    check(mcsim_hitting_fraction(rx.radius, center_distance(s, rx), s.diffusion, times[i], &out[i]));
  return out;
}

mcsim_ledger& operator+=(mcsim_ledger& a, const mcsim_ledger& b) {
  a.n_uniform += b.n_uniform;
  a.n_gaussian += b.n_gaussian;
  a.n_total_equivalent = mcsim_ledger_total(&a);
  return a;
}

template <class Fn>
void for_each_channel(const ChannelGrid& g, Fn&& fn) {
  for (double r : g.radius)
    for (double d : g.distance)
      for (double diff : g.diffusion)
        for (double dt : g.time_step) fn(r, d, diff, dt);
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CommandResult cmd_simulate(const ExperimentConfig& c, std::ostream& csv) {
  const SceneConfig& s = need_scene(c);
  const mcsim_policy policy = make_policy(c, single_xi(c));
  ScenePtr scene = build_scene(s);
  const mcsim_run_options opts = run_options(c);
  mcsim_batch* raw = nullptr;
  check(mcsim_run_batch(scene.get(), policy, &opts, &raw));
  BatchPtr batch(raw);

  const std::size_t m = mcsim_batch_sample_count(batch.get());
  const std::size_t k = mcsim_batch_receiver_count(batch.get());
  std::vector<double> times(m);
  check(mcsim_batch_times(batch.get(), times.data(), m));
  std::vector<std::vector<double>> fraction(k, std::vector<double>(m));
  std::vector<std::vector<double>> fresh(k, std::vector<double>(m));
  for (std::size_t r = 0; r < k; ++r) {
    check(mcsim_batch_fraction(batch.get(), r, fraction[r].data(), m));
    check(mcsim_batch_mean_new_absorbed(batch.get(), r, fresh[r].data(), m));
  }
  std::vector<double> analytic;
  if (k == 1) analytic = analytic_curve(s, times);

  csv << "time_s,analytic_fraction";
  for (std::size_t r = 0; r < k; ++r) csv << ",rx" << r + 1 << "_fraction";
  for (std::size_t r = 0; r < k; ++r) csv << ",rx" << r + 1 << "_new_absorbed";
  csv << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    csv << format_number(times[i]) << ',';
    if (k == 1) csv << format_number(analytic[i]);
    for (std::size_t r = 0; r < k; ++r) csv << ',' << format_number(fraction[r][i]);
    for (std::size_t r = 0; r < k; ++r) csv << ',' << format_number(fresh[r][i]);
    csv << '\n';
  }

  CommandResult result;
  check(mcsim_batch_ledger(batch.get(), &result.ledger));
  return result;
}

CommandResult cmd_predict(const ExperimentConfig& c, std::ostream& csv) {
  const ChannelGrid& g = need_channel(c);
  csv << "r_r,r_d,D,dt,kappa,r2_fit1,r2_fit2,r2_fit3,r2_clamped\n";
  for_each_channel(g, [&](double r, double d, double diff, double dt) {
    double kappa = 0.0;
    check(mcsim_kappa(r, d, diff, dt, &kappa));
    double fits[4];
    const mcsim_fit_order orders[4] = {MCSIM_FIT_LINEAR, MCSIM_FIT_QUADRATIC, MCSIM_FIT_CUBIC,
                                       MCSIM_FIT_CLAMPED_CUBIC};
    for (int i = 0; i < 4; ++i) check(mcsim_predict_r2(kappa, orders[i], &fits[i]));
    csv << format_number(r) << ',' << format_number(d) << ',' << format_number(diff) << ','
        << format_number(dt) << ',' << format_number(kappa);
    for (double f : fits) csv << ',' << format_number(f);
    csv << '\n';
  });
  return {};
}

CommandResult cmd_measure(const ExperimentConfig& c, std::ostream& csv) {
  const ChannelGrid& g = need_channel(c);
  const mcsim_policy policy = make_policy(c, single_xi(c));
  const mcsim_run_options opts = run_options(c);
  CommandResult result;
  csv << "r_r,r_d,D,dt,kappa,measured_r2,measured_rmse,predicted_r2_clamped,flag\n";
  for_each_channel(g, [&](double r, double d, double diff, double dt) {
    double kappa = 0.0;
    double predicted = 0.0;
    check(mcsim_kappa(r, d, diff, dt, &kappa));
    check(mcsim_predict_r2(kappa, MCSIM_FIT_CLAMPED_CUBIC, &predicted));
    const mcsim_channel channel{diff, d, r, dt, g.molecules};
    mcsim_accuracy acc{};
    const mcsim_status st = mcsim_measure_one_step(&channel, policy, &opts, &acc);
    const char* flag = "ok";
    if (st == MCSIM_ERR_DEGENERATE_VARIANCE)
      flag = "degenerate_variance";
    else
      check(st);
    result.ledger += acc.ledger;
    csv << format_number(r) << ',' << format_number(d) << ',' << format_number(diff) << ','
        << format_number(dt) << ',' << format_number(kappa) << ',' << format_number(acc.r_squared)
        << ',' << format_number(acc.rmse) << ',' << format_number(predicted) << ',' << flag << '\n';
  });
  return result;
}

CommandResult cmd_asymptote(const ExperimentConfig& c, std::ostream& out) {
  if (!c.asymptote) throw ConfigError("asymptote: radius and distance are required");
  const AsymptoteConfig& a = *c.asymptote;
  mcsim_series_result series{};
  const mcsim_status st = mcsim_two_rx_asymptote(a.radius, a.distance, a.tol, a.n_max, &series);
  if (st != MCSIM_ERR_NOT_CONVERGED) check(st);
  out << "radius_m,distance_m,value,terms,converged,last_term\n"
      << format_number(a.radius) << ',' << format_number(a.distance) << ','
      << format_number(series.value) << ',' << series.terms << ',' << series.converged << ','
      << format_number(series.last_term) << '\n';
  CommandResult result;
  if (st == MCSIM_ERR_NOT_CONVERGED) result.exit_code = kExitNotConverged;
  return result;
}

CommandResult cmd_threshold_sweep(const ExperimentConfig& c, std::ostream& csv) {
  const SceneConfig& s = need_scene(c);
  ScenePtr scene = build_scene(s);
  const mcsim_run_options opts = run_options(c);
  const bool has_reference = s.receivers.size() == 1;
  CommandResult result;
  csv << "xi,n_uniform,n_gaussian,n_total_equivalent,measured_r2,flag\n";
  for (double xi : c.xi) {
    mcsim_batch* raw = nullptr;
    check(mcsim_run_batch(scene.get(), make_policy(c, xi), &opts, &raw));
    BatchPtr batch(raw);
    mcsim_ledger ledger{};
    check(mcsim_batch_ledger(batch.get(), &ledger));
    result.ledger += ledger;

    double r2 = std::numeric_limits<double>::quiet_NaN();
    const char* flag = "no_reference";
    if (has_reference) {
      const std::size_t m = mcsim_batch_sample_count(batch.get());
      std::vector<double> times(m), sim(m);
      check(mcsim_batch_times(batch.get(), times.data(), m));
      check(mcsim_batch_fraction(batch.get(), 0, sim.data(), m));
      const std::vector<double> ref = analytic_curve(s, times);
      const mcsim_status st = mcsim_r_squared(ref.data(), sim.data(), m, &r2);
      if (st == MCSIM_ERR_DEGENERATE_VARIANCE) {
        r2 = std::numeric_limits<double>::quiet_NaN();
        flag = "degenerate_variance";
      } else {
        check(st);
        flag = "ok";
      }
    }
    csv << format_number(xi) << ',' << ledger.n_uniform << ',' << ledger.n_gaussian << ','
        << format_number(ledger.n_total_equivalent) << ',' << format_number(r2) << ',' << flag
        << '\n';
  }
  return result;
}

std::string manifest_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

void write_manifest(const std::string& path, const ExperimentConfig& config,
                    const mcsim_ledger& ledger, double elapsed_s) {
  const nlohmann::json manifest{
      {"config", to_json(config)},
      {"seed", config.seed},
      {"ledger",
       {{"n_uniform", ledger.n_uniform},
        {"n_gaussian", ledger.n_gaussian},
        {"n_total_equivalent", ledger.n_total_equivalent}}},
      {"elapsed_s", elapsed_s},
      {"tool_version", mcsim_version()}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write manifest");
  out << manifest.dump(2) << '\n';
}

}  // namespace mcsim_cli
