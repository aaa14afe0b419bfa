#ifndef MCSIM_ENGINE_HPP
#define MCSIM_ENGINE_HPP

#include <cstdint>
#include <vector>

#include "mcsim/absorption.hpp"
#include "mcsim/geometry.hpp"
#include "mcsim/stochastic.hpp"

namespace mcsim {

// Point release of `molecules` at `transmitter`, observed at `samples` instants
// 0, dt, ..., (samples - 1) dt.
struct Scene {
  double diffusion = 1e-9;
  double time_step = 0.1;
  std::int64_t samples = 2;
  std::int64_t molecules = 1;
  Vector3 transmitter{};
  std::vector<SphereReceiver> receivers;

  // Receivers must be pairwise disjoint and not contain the transmitter.
  void validate() const;
  int receiver_index(int id) const;
};

/// Single receiver of the given radius at (distance, 0, 0), transmitter at the origin.
Scene single_receiver_scene(double radius, double distance, double diffusion, double time_step,
                            std::int64_t samples, std::int64_t molecules);

/// `count` in {1, 2, 4} identical receivers at distance `distance` along +-x
/// (and +-y for four) around a transmitter at the origin.
Scene symmetric_scene(int count, double radius, double distance, double diffusion,
                      double time_step, std::int64_t samples, std::int64_t molecules);

enum class MoleculeStatus : std::uint8_t { Free, Absorbed };

struct MoleculeState {
  Vector3 position;
  MoleculeStatus status = MoleculeStatus::Free;
  int receiver_id = -1;
  std::int64_t absorbed_at = -1;  // sample index
};

// new_absorbed[r][i]: molecules absorbed by receiver index r during the step
// ending at sample i. Column 0 is always zero.
struct StepAbsorptionHistogram {
  std::vector<std::vector<std::int64_t>> new_absorbed;

  std::int64_t total() const;
};

struct RealizationResult {
  StepAbsorptionHistogram histogram;
  std::vector<std::int64_t> free_count;  // per sample
  RvLedger ledger;
  std::int64_t apmc_reverts = 0;
  // Free molecules found inside a receiver at a sample instant. Always zero for a correct engine.
  std::int64_t outside_violations = 0;
};

struct FractionCurve {
  std::vector<double> times;
  std::vector<std::vector<double>> fractions;  // [receiver index][sample]
  std::int64_t realizations = 0;
};

struct BatchResult {
  FractionCurve curve;
  RvLedger ledger;
  std::vector<std::vector<double>> mean_new_absorbed;  // [receiver index][sample]
  std::vector<RealizationResult> realizations;
};

// APMC re-propagation attempts allowed per molecule per step.
inline constexpr int kApmcRetryCap = 100;

/// One release of N molecules stepped through samples - 1 steps.
/// Throws Error{RetryCapExceeded} when an APMC revert loop exceeds kApmcRetryCap.
RealizationResult run_realization(const Scene& scene, const AbsorptionPolicy& policy,
                                  std::uint64_t seed, std::uint64_t stream_index);

/// Independent realizations 0..count-1 on up to `workers` threads. The result
/// does not depend on `workers`.
BatchResult run_batch(const Scene& scene, const AbsorptionPolicy& policy, std::uint64_t seed,
                      std::int64_t realizations, int workers = 1);

}  // namespace mcsim

#endif
