#ifndef MCSIM_METRICS_HPP
#define MCSIM_METRICS_HPP

#include <cstdint>
#include <span>

#include "mcsim/absorption.hpp"
#include "mcsim/analytics.hpp"
#include "mcsim/stochastic.hpp"

namespace mcsim {

struct AccuracyReport {
  double r_squared = 0.0;
  double rmse = 0.0;
  std::int64_t samples = 0;
  double analytic_fraction = 0.0;   // at the last sample
  double simulated_fraction = 0.0;  // at the last sample
  bool degenerate = false;          // r_squared undefined (NaN)
  RvLedger ledger;
};

/// 1 - sum (analytic - simulated)^2 / sum (simulated - mean(simulated))^2.
/// Both sums zero gives exactly 1; only the denominator zero throws DegenerateVariance.
double r_squared(std::span<const double> analytic, std::span<const double> simulated);

double rmse(std::span<const double> analytic, std::span<const double> simulated);

/// Dimensionless accuracy predictor r_r (r_d D dt)^(-1/3).
double kappa(double radius, double distance, double diffusion, double dt);

enum class FitOrder { Linear, Quadratic, Cubic, ClampedCubic };

inline constexpr double kClampLow = 0.0726;
inline constexpr double kClampHigh = 0.612;

/// Predicted one-step R^2 of the refined Monte Carlo policy from kappa.
double predict_r2(double kappa_value, FitOrder order);

/// One step (two samples: t = 0 and t = dt) with a single receiver, scored
/// against the analytic hitting fraction.
/// Throws DegenerateVariance when nothing was absorbed.
AccuracyReport measure_one_step_accuracy(const ChannelParams& params, const AbsorptionPolicy& policy,
                                         std::uint64_t seed, std::int64_t realizations,
                                         int workers = 1);

/// Same measurement, reporting a degenerate R^2 through `degenerate` instead of throwing.
AccuracyReport try_measure_one_step_accuracy(const ChannelParams& params,
                                             const AbsorptionPolicy& policy, std::uint64_t seed,
                                             std::int64_t realizations, int workers = 1);

}  // namespace mcsim

#endif
