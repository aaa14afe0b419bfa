#ifndef MCSIM_STOCHASTIC_HPP
#define MCSIM_STOCHASTIC_HPP

#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "mcsim/geometry.hpp"

namespace mcsim {

// Counts of generated variates. Gaussians are converted to uniform equivalents
// at 4/pi each (polar/Box-Muller acceptance rate) regardless of how they are drawn.
struct RvLedger {
  std::uint64_t n_uniform = 0;
  std::uint64_t n_gaussian = 0;

  RvLedger& operator+=(const RvLedger& other) {
    n_uniform += other.n_uniform;
    n_gaussian += other.n_gaussian;
    return *this;
  }
  friend RvLedger operator+(RvLedger a, const RvLedger& b) { return a += b; }
  friend bool operator==(const RvLedger&, const RvLedger&) = default;
};

inline double ledger_total(const RvLedger& ledger) {
  return static_cast<double>(ledger.n_uniform) +
         (4.0 / std::numbers::pi) * static_cast<double>(ledger.n_gaussian);
}

// Anything that can hand out canonical uniforms in [0, 1).
template <class S>
concept UniformSource = requires(S s) {
  { s.next_canonical() } -> std::convertible_to<double>;
};

/// Per-realization random stream. Identical (seed, index) pairs replay the same
/// sequence; distinct indices are seeded through seed_seq and are independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return index_; }

  // 53 random mantissa bits; never returns 1.0.
  double next_canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next_gaussian() { return normal_(engine_); }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
};

template <UniformSource S>
double sample_uniform(S& stream, RvLedger& ledger) {
  ++ledger.n_uniform;
  return stream.next_canonical();
}

/// Brownian displacement over `dt`: three independent N(0, 2 D dt) components.
Vector3 sample_displacement(RngStream& stream, double diffusion, double dt, RvLedger& ledger);

}  // namespace mcsim

#endif
