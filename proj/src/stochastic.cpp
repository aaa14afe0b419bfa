#include "mcsim/stochastic.hpp"

#include <array>
#include <cmath>

namespace mcsim {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), index_(stream_index) {
  const std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_index), static_cast<std::uint32_t>(stream_index >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

Vector3 sample_displacement(RngStream& stream, double diffusion, double dt, RvLedger& ledger) {
  const double sigma = std::sqrt(2.0 * diffusion * dt);
  ledger.n_gaussian += 3;
  const double dx = stream.next_gaussian();
  const double dy = stream.next_gaussian();
  const double dz = stream.next_gaussian();
  return {sigma * dx, sigma * dy, sigma * dz};
}

}  // namespace mcsim
