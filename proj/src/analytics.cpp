#include "mcsim/analytics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mcsim/error.hpp"

namespace mcsim {

void ChannelParams::validate() const {
  if (!(diffusion > 0.0) || !std::isfinite(diffusion)) throw_invalid("diffusion must be positive");
  if (!(time_step > 0.0) || !std::isfinite(time_step)) throw_invalid("time_step must be positive");
  if (!(radius > 0.0)) throw_invalid("radius must be positive");
  if (!(radius <= distance) || !std::isfinite(distance))
    throw_invalid("radius must not exceed distance");
  if (molecules < 1) throw_invalid("molecules must be >= 1");
}

double erfc(double x) {
  if (x > 26.0) return 0.0;
  if (x < -26.0) return 2.0;
  return std::erfc(x);
}

double hitting_fraction(double radius, double distance, double diffusion, double t) {
  if (!(radius > 0.0)) throw_invalid("hitting_fraction: radius must be positive");
  if (radius > distance) throw_invalid("hitting_fraction: transmitter inside receiver");
  if (!(diffusion > 0.0)) throw_invalid("hitting_fraction: diffusion must be positive");
  if (!(t >= 0.0)) throw_invalid("hitting_fraction: negative time");
  const double gap = distance - radius;
  if (t == 0.0) return gap > 0.0 ? 0.0 : 1.0;
  return (radius / distance) * erfc(gap / std::sqrt(4.0 * diffusion * t));
}

double planar_intra_step_prob(double l_initial, double l_final, double diffusion, double dt) {
  const double exponent = (l_initial * l_final) / (diffusion * dt);
  // exp(-746) already rounds to zero; skip the slow underflow path.
  if (exponent > 746.0) return 0.0;
  return std::exp(-exponent);
}

double apriori_prob(double radius, double center_distance, double diffusion, double dt) {
  if (center_distance < radius)
    throw_invalid("apriori_prob: query point inside receiver (d_j < radius)");
  return hitting_fraction(radius, center_distance, diffusion, dt);
}

double legendre_p(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2 * k + 1) * x * cur - k * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// sinh(a) / sinh(b) for 0 <= a <= b without overflow.
double sinh_ratio(double a, double b) {
  if (b == 0.0) return 1.0;
  return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

}  // namespace

SeriesResult bispherical_capture(double mu, double eta, double mu1, double tol, int n_max) {
  if (!(mu1 > 0.0)) throw_invalid("bispherical_capture: mu1 must be positive");
  if (mu < -mu1 || mu > mu1) throw_invalid("bispherical_capture: point inside a receiver");
  if (!(tol > 0.0) || n_max < 1) throw_invalid("bispherical_capture: bad tolerance or n_max");

  const double mu2 = -mu1;
  const double x = std::cos(eta);
  const double prefactor = std::sqrt(2.0 * (std::cosh(mu) - x));

  SeriesResult out;
  double p_prev = 1.0;
  double p_cur = x;
  for (int n = 0; n < n_max; ++n) {
    const double p_n = n == 0 ? 1.0 : p_cur;
    const double h = n + 0.5;
    // |P_n(x)| <= 1 on [-1, 1], so `envelope` bounds this and every later term.
    const double envelope =
        prefactor * std::exp(-h * mu1) * sinh_ratio(h * (mu - mu2), h * (mu1 - mu2));
    const double term = envelope * p_n;
    out.value += term;
    out.terms = n + 1;
    out.last_term = term;
    if (envelope < tol) {
      out.converged = true;
      break;
    }
    if (n >= 1) {
      const double next = ((2 * n + 1) * x * p_cur - n * p_prev) / (n + 1);
      p_prev = p_cur;
      p_cur = next;
    }
  }
  return out;
}

SeriesResult two_rx_asymptote(double radius, double distance, double tol, int n_max) {
  if (!(radius > 0.0) || !(distance > radius))
    throw_invalid("two_rx_asymptote: requires distance > radius > 0");
  if (!(tol > 0.0) || n_max < 1) throw_invalid("two_rx_asymptote: bad tolerance or n_max");

  // The transmitter sits at bispherical (mu, eta) = (0, pi), where
  // cosh(mu) - cos(eta) = 2 and P_n(-1) = (-1)^n, so each term collapses to
  // (-1)^n 2 e^{-(n+1/2) mu1} sinh((n+1/2) mu1) / sinh((2n+1) mu1)
  //   = (-1)^n 2 / (e^{(2n+1) mu1} + 1).
  const double mu1 = std::acosh(distance / radius);
  SeriesResult out;
  for (int n = 0; n < n_max; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double growth = std::exp((2 * n + 1) * mu1);
    const double term = std::isinf(growth) ? 0.0 : sign * 2.0 / (growth + 1.0);
    out.value += term;
    out.terms = n + 1;
    out.last_term = term;
    if (std::abs(term) < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace mcsim
