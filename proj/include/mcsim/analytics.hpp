#ifndef MCSIM_ANALYTICS_HPP
#define MCSIM_ANALYTICS_HPP

#include <cstdint>

namespace mcsim {

// Single-receiver channel: point transmitter at distance `distance` from the
// center of a receiver of radius `radius`.
struct ChannelParams {
  double diffusion = 0.0;  // m^2/s
  double distance = 0.0;   // m, transmitter to receiver center
  double radius = 0.0;     // m
  double time_step = 0.0;  // s
  std::int64_t molecules = 1;

  void validate() const;
};

/// Complementary error function; exactly 0 above x = 26 and exactly 2 below -26.
double erfc(double x);

/// Fraction of molecules released at distance d from a receiver of radius a
/// that have been absorbed by time t: (a/d) erfc((d - a) / sqrt(4 D t)).
double hitting_fraction(double radius, double distance, double diffusion, double t);

/// Crossing probability of a planar absorbing wall within one step, given the
/// distances to the wall at the start and end of the step.
double planar_intra_step_prob(double l_initial, double l_final, double diffusion, double dt);

/// Probability that a free molecule at center distance d_j is absorbed within the next step.
double apriori_prob(double radius, double center_distance, double diffusion, double dt);

/// Legendre polynomial P_n(x) by the three-term recurrence.
double legendre_p(int n, double x);

struct SeriesResult {
  double value = 0.0;
  int terms = 0;
  bool converged = false;
  double last_term = 0.0;
};

/// Eventual capture probability at receiver 1 for a molecule at bispherical
/// coordinates (mu, eta), with receivers on the coordinate surfaces mu = +mu1
/// and mu = -mu1. General point evaluation with explicit Legendre terms.
SeriesResult bispherical_capture(double mu, double eta, double mu1, double tol, int n_max);

/// Asymptotic per-receiver absorbed fraction for two identical receivers of
/// radius `radius` centered at +-`distance` around the transmitter.
SeriesResult two_rx_asymptote(double radius, double distance, double tol = 1e-12,
                              int n_max = 500);

}  // namespace mcsim

#endif
