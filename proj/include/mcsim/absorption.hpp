#ifndef MCSIM_ABSORPTION_HPP
#define MCSIM_ABSORPTION_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "mcsim/analytics.hpp"
#include "mcsim/geometry.hpp"
#include "mcsim/stochastic.hpp"

namespace mcsim {

enum class PolicyKind { Smc, Rmc, LineCrossing, Apmc };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

// `xi` is the likelihood threshold: computed absorption probabilities below it
// skip the uniform draw. SMC and line crossing never draw, so they ignore it.
struct AbsorptionPolicy {
  PolicyKind kind = PolicyKind::Rmc;
  double xi = 0.0;

  void validate() const;
};

struct Decision {
  bool absorbed = false;
  int receiver_id = -1;
  int uniforms_drawn = 0;

  static Decision none(int drawn = 0) { return {false, -1, drawn}; }
  static Decision hit(int id, int drawn = 0) { return {true, id, drawn}; }
};

/// Receivers in a scene never number more than this; the per-call ordering
/// buffer lives on the stack.
inline constexpr std::size_t kMaxReceivers = 16;

namespace detail {

struct Ranked {
  double key;
  std::size_t index;
};

// Indices of `rxs` ordered by ascending key. Exact ties are ordered cyclically
// starting at receiver `rotation % n`.
template <class KeyFn>
std::size_t rank_receivers(std::span<const SphereReceiver> rxs, KeyFn key, std::size_t rotation,
                           std::array<Ranked, kMaxReceivers>& out) {
  const std::size_t n = std::min(rxs.size(), kMaxReceivers);
  if (n == 0) return 0;
  const std::size_t first = rotation % n;
  auto before = [&](const Ranked& a, const Ranked& b) {
    if (a.key != b.key) return a.key < b.key;
    return (a.index + n - first) % n < (b.index + n - first) % n;
  };
  // Insertion sort: n is tiny and this runs once per molecule per step.
  for (std::size_t i = 0; i < n; ++i) {
    Ranked item{key(rxs[i]), i};
    std::size_t j = i;
    for (; j > 0 && before(item, out[j - 1]); --j) out[j] = out[j - 1];
    out[j] = item;
  }
  return n;
}

}  // namespace detail

/// Absorbed iff the post-move position lies inside a receiver.
inline Decision decide_smc(const Vector3& end_pos, std::span<const SphereReceiver> rxs) {
  for (const auto& rx : rxs)
    if (is_inside(end_pos, rx)) return Decision::hit(rx.id);
  return Decision::none();
}

/// Absorbed iff the straight segment of the move touches a receiver ball; the
/// receiver entered first along the segment wins.
inline Decision decide_line(const Vector3& start_pos, const Vector3& end_pos,
                            std::span<const SphereReceiver> rxs) {
  std::optional<double> best_t;
  int best_id = -1;
  for (const auto& rx : rxs) {
    const auto t = segment_entry_parameter(start_pos, end_pos, rx);
    if (t && (!best_t || *t < *best_t)) {
      best_t = t;
      best_id = rx.id;
    }
  }
  return best_t ? Decision::hit(best_id) : Decision::none();
}

/// Refined Monte Carlo: end-point containment, else the planar crossing
/// probability per receiver (nearest end position first), one uniform per test.
/// `tie_rotation` (the molecule index in the engine) picks which receiver goes
/// first among exactly equidistant ones.
template <UniformSource S>
Decision decide_rmc(const Vector3& start_pos, const Vector3& end_pos,
                    std::span<const SphereReceiver> rxs, double diffusion, double dt,
                    const AbsorptionPolicy& policy, S& stream, RvLedger& ledger,
                    std::size_t tie_rotation = 0) {
  for (const auto& rx : rxs)
    if (is_inside(end_pos, rx)) return Decision::hit(rx.id);

  std::array<detail::Ranked, kMaxReceivers> order;
  const std::size_t n = detail::rank_receivers(
      rxs, [&](const SphereReceiver& rx) { return signed_surface_distance(end_pos, rx); },
      tie_rotation, order);

  int drawn = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const SphereReceiver& rx = rxs[order[k].index];
    const double l_i = std::max(signed_surface_distance(start_pos, rx), 0.0);
    const double l_f = std::max(order[k].key, 0.0);
    const double pr = planar_intra_step_prob(l_i, l_f, diffusion, dt);
    if (pr < policy.xi) continue;
    const double u = sample_uniform(stream, ledger);
    ++drawn;
    if (pr >= u) return Decision::hit(rx.id, drawn);
  }
  return Decision::none(drawn);
}

/// A priori test made before the move: absorb with the probability that a
/// molecule at the current center distance reaches the receiver within dt.
/// Receivers are tested nearest first; see decide_rmc for `tie_rotation`.
template <UniformSource S>
Decision decide_apmc_preliminary(const Vector3& pos, std::span<const SphereReceiver> rxs,
                                 double diffusion, double dt, const AbsorptionPolicy& policy,
                                 S& stream, RvLedger& ledger, std::size_t tie_rotation = 0) {
  std::array<detail::Ranked, kMaxReceivers> order;
  const std::size_t n = detail::rank_receivers(
      rxs, [&](const SphereReceiver& rx) { return norm(pos - rx.center); }, tie_rotation, order);

  int drawn = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const SphereReceiver& rx = rxs[order[k].index];
    const double d_j = std::max(order[k].key, rx.radius);
    const double pr = apriori_prob(rx.radius, d_j, diffusion, dt);
    if (pr < policy.xi) continue;
    const double u = sample_uniform(stream, ledger);
    ++drawn;
    if (pr >= u) return Decision::hit(rx.id, drawn);
  }
  return Decision::none(drawn);
}

}  // namespace mcsim

#endif
