#include "mcsim/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mcsim/engine.hpp"
#include "mcsim/error.hpp"

namespace mcsim {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, std::size_t min_len,
                const char* who) {
  if (a.size() != b.size()) throw_invalid(std::string(who) + ": series lengths differ");
  if (a.size() < min_len)
    throw_invalid(std::string(who) + ": need at least " + std::to_string(min_len) + " samples");
}

double squared_error(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum;
}

}  // namespace

double r_squared(std::span<const double> analytic, std::span<const double> simulated) {
  check_pair(analytic, simulated, 2, "r_squared");
  const double mean =
      std::accumulate(simulated.begin(), simulated.end(), 0.0) / static_cast<double>(simulated.size());
  double variance = 0.0;
  for (double s : simulated) variance += (s - mean) * (s - mean);
  const double residual = squared_error(analytic, simulated);
  if (variance == 0.0) {
    if (residual == 0.0) return 1.0;
    throw Error(ErrorCode::DegenerateVariance, "r_squared: simulated series has zero variance");
  }
  return 1.0 - residual / variance;
}

double rmse(std::span<const double> analytic, std::span<const double> simulated) {
  check_pair(analytic, simulated, 1, "rmse");
  return std::sqrt(squared_error(analytic, simulated) / static_cast<double>(analytic.size()));
}

double kappa(double radius, double distance, double diffusion, double dt) {
  if (!(radius > 0.0) || !(distance > 0.0) || !(diffusion > 0.0) || !(dt > 0.0))
    throw_invalid("kappa: all inputs must be positive");
  if (radius > distance) throw_invalid("kappa: radius exceeds distance");
  return radius * std::cbrt(1.0 / (distance * diffusion * dt));
}

double predict_r2(double k, FitOrder order) {
  switch (order) {
    case FitOrder::Linear: return (101.0 * k + 47.0) / 100.0;
    case FitOrder::Quadratic: return (-372.0 * k * k + 392.0 * k - 3.0) / 100.0;
    case FitOrder::Cubic: return (979.0 * k * k * k - 1523.0 * k * k + 813.0 * k - 51.0) / 100.0;
    case FitOrder::ClampedCubic:
      if (k < kClampLow) return 0.0;
      if (k <= kClampHigh) return predict_r2(k, FitOrder::Cubic);
      return 1.0;
  }
  return 0.0;
}

AccuracyReport try_measure_one_step_accuracy(const ChannelParams& params,
                                             const AbsorptionPolicy& policy, std::uint64_t seed,
                                             std::int64_t realizations, int workers) {
  params.validate();
  const Scene scene = single_receiver_scene(params.radius, params.distance, params.diffusion,
                                            params.time_step, 2, params.molecules);
  const BatchResult batch = run_batch(scene, policy, seed, realizations, workers);

  const double p_sim = batch.curve.fractions[0][1];
  const double p_hit = hitting_fraction(params.radius, params.distance, params.diffusion, params.time_step);
  const std::vector<double> analytic{0.0, p_hit};
  const std::vector<double> simulated{0.0, p_sim};

  AccuracyReport report;
  report.samples = 2;
  report.analytic_fraction = p_hit;
  report.simulated_fraction = p_sim;
  report.rmse = rmse(analytic, simulated);
  report.ledger = batch.ledger;
  try {
    report.r_squared = r_squared(analytic, simulated);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateVariance) throw;
    report.r_squared = std::numeric_limits<double>::quiet_NaN();
    report.degenerate = true;
  }
  return report;
}

AccuracyReport measure_one_step_accuracy(const ChannelParams& params, const AbsorptionPolicy& policy,
                                         std::uint64_t seed, std::int64_t realizations, int workers) {
  AccuracyReport report = try_measure_one_step_accuracy(params, policy, seed, realizations, workers);
  if (report.degenerate)
    throw Error(ErrorCode::DegenerateVariance, "one-step measurement: no molecule was absorbed");
  return report;
}

}  // namespace mcsim
