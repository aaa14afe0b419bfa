#include "mcsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "mcsim/error.hpp"

namespace mcsim {

void Scene::validate() const {
  if (!(diffusion > 0.0) || !std::isfinite(diffusion)) throw_invalid("scene: diffusion must be positive");
  if (!(time_step > 0.0) || !std::isfinite(time_step)) throw_invalid("scene: time_step must be positive");
  if (samples < 2) throw_invalid("scene: samples must be >= 2");
  if (molecules < 1) throw_invalid("scene: molecules must be >= 1");
  if (!is_finite(transmitter)) throw_invalid("scene: transmitter position must be finite");
  if (receivers.size() > kMaxReceivers)
    throw_invalid("scene: at most " + std::to_string(kMaxReceivers) + " receivers");
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    const auto& rx = receivers[i];
    if (!(rx.radius > 0.0) || !std::isfinite(rx.radius) || !is_finite(rx.center))
      throw_invalid("scene: receiver " + std::to_string(rx.id) + " has invalid geometry");
    if (!(signed_surface_distance(transmitter, rx) > 0.0))
      throw_invalid("scene: transmitter is not strictly outside receiver " + std::to_string(rx.id));
    for (std::size_t j = 0; j < i; ++j) {
      const auto& other = receivers[j];
      if (other.id == rx.id) throw_invalid("scene: duplicate receiver id " + std::to_string(rx.id));
      if (!(norm(rx.center - other.center) > rx.radius + other.radius))
        throw_invalid("scene: receivers " + std::to_string(other.id) + " and " +
                      std::to_string(rx.id) + " overlap");
    }
  }
}

int Scene::receiver_index(int id) const {
  for (std::size_t i = 0; i < receivers.size(); ++i)
    if (receivers[i].id == id) return static_cast<int>(i);
  return -1;
}

Scene single_receiver_scene(double radius, double distance, double diffusion, double time_step,
                            std::int64_t samples, std::int64_t molecules) {
  return symmetric_scene(1, radius, distance, diffusion, time_step, samples, molecules);
}

Scene symmetric_scene(int count, double radius, double distance, double diffusion,
                      double time_step, std::int64_t samples, std::int64_t molecules) {
  if (count != 1 && count != 2 && count != 4) throw_invalid("symmetric_scene: count must be 1, 2 or 4");
  Scene scene;
  scene.diffusion = diffusion;
  scene.time_step = time_step;
  scene.samples = samples;
  scene.molecules = molecules;
  const Vector3 centers[4] = {
      {distance, 0, 0}, {-distance, 0, 0}, {0, distance, 0}, {0, -distance, 0}};
  for (int i = 0; i < count; ++i) scene.receivers.push_back({i + 1, centers[i], radius});
  return scene;
}

std::int64_t StepAbsorptionHistogram::total() const {
  std::int64_t sum = 0;
  for (const auto& row : new_absorbed) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

namespace {

bool inside_any(const Vector3& p, std::span<const SphereReceiver> rxs) {
  return std::any_of(rxs.begin(), rxs.end(), [&](const SphereReceiver& rx) { return is_inside(p, rx); });
}

std::string describe_retry_failure(std::size_t molecule, std::int64_t step, const Vector3& p) {
  std::ostringstream os;
  os.precision(17);
  os << "APMC revert loop exceeded " << kApmcRetryCap << " re-propagations for molecule "
     << molecule << " in step " << step << " at (" << p.x << ", " << p.y << ", " << p.z << ")";
  return os.str();
}

}  // namespace

RealizationResult run_realization(const Scene& scene, const AbsorptionPolicy& policy,
                                  std::uint64_t seed, std::uint64_t stream_index) {
  scene.validate();
  policy.validate();

  const auto n_rx = scene.receivers.size();
  const auto n_samples = static_cast<std::size_t>(scene.samples);
  const std::span<const SphereReceiver> rxs(scene.receivers);
  const double D = scene.diffusion;
  const double dt = scene.time_step;

  RealizationResult result;
  result.histogram.new_absorbed.assign(n_rx, std::vector<std::int64_t>(n_samples, 0));
  result.free_count.assign(n_samples, 0);
  result.free_count[0] = scene.molecules;

  RngStream stream(seed, stream_index);
  RvLedger& ledger = result.ledger;

  std::vector<MoleculeState> molecules(static_cast<std::size_t>(scene.molecules),
                                       MoleculeState{scene.transmitter});
  std::vector<std::size_t> free_list(molecules.size());
  std::iota(free_list.begin(), free_list.end(), std::size_t{0});

  auto absorb = [&](std::size_t j, const Decision& d, std::int64_t step) {
    auto& m = molecules[j];
    m.status = MoleculeStatus::Absorbed;
    m.receiver_id = d.receiver_id;
    m.absorbed_at = step;
    ++result.histogram.new_absorbed[static_cast<std::size_t>(scene.receiver_index(d.receiver_id))]
                                   [static_cast<std::size_t>(step)];
  };

  for (std::int64_t step = 1; step < scene.samples; ++step) {
    if (policy.kind == PolicyKind::Apmc) {
      for (std::size_t j : free_list) {
        const Decision d = decide_apmc_preliminary(molecules[j].position, rxs, D, dt, policy, stream, ledger, j);
        if (d.absorbed) absorb(j, d, step);
      }
      for (std::size_t j : free_list) {
        auto& m = molecules[j];
        if (m.status != MoleculeStatus::Free) continue;
        const Vector3 start = m.position;
        Vector3 end = start + sample_displacement(stream, D, dt, ledger);
        int retries = 0;
        while (inside_any(end, rxs)) {
          if (++retries > kApmcRetryCap)
            throw Error(ErrorCode::RetryCapExceeded, describe_retry_failure(j, step, start));
          ++result.apmc_reverts;
          end = start + sample_displacement(stream, D, dt, ledger);
        }
        m.position = end;
      }
    } else {
      for (std::size_t j : free_list) {
        auto& m = molecules[j];
        const Vector3 start = m.position;
        const Vector3 end = start + sample_displacement(stream, D, dt, ledger);
        Decision d;
        switch (policy.kind) {
          case PolicyKind::Smc: d = decide_smc(end, rxs); break;
          case PolicyKind::LineCrossing: d = decide_line(start, end, rxs); break;
          case PolicyKind::Rmc: d = decide_rmc(start, end, rxs, D, dt, policy, stream, ledger, j); break;
          case PolicyKind::Apmc: break;
        }
        if (d.absorbed)
          absorb(j, d, step);
        else
          m.position = end;
      }
    }

    std::erase_if(free_list, [&](std::size_t j) { return molecules[j].status != MoleculeStatus::Free; });
    for (std::size_t j : free_list)
      if (inside_any(molecules[j].position, rxs)) ++result.outside_violations;
    result.free_count[static_cast<std::size_t>(step)] = static_cast<std::int64_t>(free_list.size());
  }
  return result;
}

BatchResult run_batch(const Scene& scene, const AbsorptionPolicy& policy, std::uint64_t seed,
                      std::int64_t realizations, int workers) {
  if (realizations < 1) throw_invalid("run_batch: realizations must be >= 1");
  scene.validate();
  policy.validate();

  const auto count = static_cast<std::size_t>(realizations);
  std::vector<RealizationResult> results(count);
  std::vector<std::exception_ptr> errors(count);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = run_realization(scene, policy, seed, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto n_threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, count);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "realization " + std::to_string(i) + ": " + e.what());
    }
  }

  const auto n_rx = scene.receivers.size();
  const auto n_samples = static_cast<std::size_t>(scene.samples);

  BatchResult batch;
  batch.curve.realizations = realizations;
  batch.curve.times.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    batch.curve.times[i] = static_cast<double>(i) * scene.time_step;

  // Integer sums first so the reduction is exact and order independent.
  std::vector<std::vector<std::int64_t>> summed(n_rx, std::vector<std::int64_t>(n_samples, 0));
  for (const auto& r : results) {
    batch.ledger += r.ledger;
    for (std::size_t k = 0; k < n_rx; ++k)
      for (std::size_t i = 0; i < n_samples; ++i) summed[k][i] += r.histogram.new_absorbed[k][i];
  }

  const double released = static_cast<double>(scene.molecules) * static_cast<double>(realizations);
  batch.curve.fractions.assign(n_rx, std::vector<double>(n_samples, 0.0));
  batch.mean_new_absorbed.assign(n_rx, std::vector<double>(n_samples, 0.0));
  for (std::size_t k = 0; k < n_rx; ++k) {
    std::int64_t cumulative = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
      cumulative += summed[k][i];
      batch.curve.fractions[k][i] = static_cast<double>(cumulative) / released;
      batch.mean_new_absorbed[k][i] =
          static_cast<double>(summed[k][i]) / static_cast<double>(realizations);
    }
  }
  batch.realizations = std::move(results);
  return batch;
}

}  // namespace mcsim
