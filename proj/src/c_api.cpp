#include "mcsim/mcsim.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <span>
#include <string>

#include "mcsim/analytics.hpp"
#include "mcsim/engine.hpp"
#include "mcsim/error.hpp"
#include "mcsim/metrics.hpp"
#include "mcsim/version.hpp"

struct mcsim_scene {
  mcsim::Scene scene;
};

struct mcsim_batch {
  mcsim::BatchResult result;
};

namespace {

thread_local std::string g_last_error;

mcsim_status fail(mcsim_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

mcsim_status status_of(mcsim::ErrorCode code) {
  switch (code) {
    case mcsim::ErrorCode::InvalidArgument: return MCSIM_ERR_INVALID_ARGUMENT;
    case mcsim::ErrorCode::DegenerateVariance: return MCSIM_ERR_DEGENERATE_VARIANCE;
    case mcsim::ErrorCode::RetryCapExceeded: return MCSIM_ERR_RETRY_CAP_EXCEEDED;
    case mcsim::ErrorCode::NotConverged: return MCSIM_ERR_NOT_CONVERGED;
  }
  return MCSIM_ERR_INTERNAL;
}

// Runs `body` and converts any escaping exception into a status code.
template <class Fn>
mcsim_status guarded(Fn&& body) noexcept {
  try {
    return body();
  } catch (const mcsim::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MCSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MCSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MCSIM_ERR_INTERNAL, "unknown exception");
  }
}

bool valid_algorithm(mcsim_algorithm a) {
  return a == MCSIM_SMC || a == MCSIM_RMC || a == MCSIM_LINE_CROSSING || a == MCSIM_APMC;
}

mcsim::AbsorptionPolicy to_policy(mcsim_policy p) {
  if (!valid_algorithm(p.algorithm)) mcsim::throw_invalid("unknown algorithm value");
  mcsim::AbsorptionPolicy policy;
  switch (p.algorithm) {
    case MCSIM_SMC: policy.kind = mcsim::PolicyKind::Smc; break;
    case MCSIM_RMC: policy.kind = mcsim::PolicyKind::Rmc; break;
    case MCSIM_LINE_CROSSING: policy.kind = mcsim::PolicyKind::LineCrossing; break;
    case MCSIM_APMC: policy.kind = mcsim::PolicyKind::Apmc; break;
  }
  policy.xi = p.xi;
  policy.validate();
  return policy;
}

mcsim_ledger to_c(const mcsim::RvLedger& ledger) {
  return {ledger.n_uniform, ledger.n_gaussian, mcsim::ledger_total(ledger)};
}

mcsim_status check_len(const mcsim_batch* batch, const void* out, size_t len) {
  if (batch == nullptr || out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  if (len != batch->result.curve.times.size())
    return fail(MCSIM_ERR_INVALID_ARGUMENT, "buffer length must equal the sample count (" +
                                                std::to_string(batch->result.curve.times.size()) + ")");
  return MCSIM_OK;
}

template <class T>
void copy_out(std::span<const T> src, T* out) {
  std::memcpy(out, src.data(), src.size_bytes());
}

}  // namespace

extern "C" {

const char* mcsim_version(void) { return MCSIM_VERSION_STRING; }

const char* mcsim_last_error(void) { return g_last_error.c_str(); }

const char* mcsim_status_name(mcsim_status status) {
  switch (status) {
    case MCSIM_OK: return "ok";
    case MCSIM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MCSIM_ERR_DEGENERATE_VARIANCE: return "degenerate_variance";
    case MCSIM_ERR_RETRY_CAP_EXCEEDED: return "retry_cap_exceeded";
    case MCSIM_ERR_NOT_CONVERGED: return "not_converged";
    case MCSIM_ERR_OUT_OF_RANGE: return "out_of_range";
    case MCSIM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

mcsim_status mcsim_algorithm_from_name(const char* name, mcsim_algorithm* out) {
  if (name == nullptr || out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  const auto kind = mcsim::parse_policy_kind(name);
  if (!kind) return fail(MCSIM_ERR_INVALID_ARGUMENT, std::string("unknown algorithm '") + name + "'");
  switch (*kind) {
    case mcsim::PolicyKind::Smc: *out = MCSIM_SMC; break;
    case mcsim::PolicyKind::Rmc: *out = MCSIM_RMC; break;
    case mcsim::PolicyKind::LineCrossing: *out = MCSIM_LINE_CROSSING; break;
    case mcsim::PolicyKind::Apmc: *out = MCSIM_APMC; break;
  }
  return MCSIM_OK;
}

const char* mcsim_algorithm_name(mcsim_algorithm algorithm) {
  switch (algorithm) {
    case MCSIM_SMC: return "smc";
    case MCSIM_RMC: return "rmc";
    case MCSIM_LINE_CROSSING: return "line";
    case MCSIM_APMC: return "apmc";
  }
  return "unknown";
}

mcsim_status mcsim_scene_create(double diffusion, double time_step, int64_t samples,
                                int64_t molecules, mcsim_scene** out) {
  if (out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<mcsim_scene>();
    handle->scene.diffusion = diffusion;
    handle->scene.time_step = time_step;
    handle->scene.samples = samples;
    handle->scene.molecules = molecules;
    handle->scene.validate();
    *out = handle.release();
    return MCSIM_OK;
  });
}

mcsim_status mcsim_scene_clone(const mcsim_scene* scene, mcsim_scene** out) {
  if (scene == nullptr || out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new mcsim_scene(*scene);
    return MCSIM_OK;
  });
}

void mcsim_scene_destroy(mcsim_scene* scene) { delete scene; }

mcsim_status mcsim_scene_set_transmitter(mcsim_scene* scene, double x, double y, double z) {
  if (scene == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null scene");
  return guarded([&] {
    mcsim::Scene candidate = scene->scene;
    candidate.transmitter = {x, y, z};
    candidate.validate();
    scene->scene = std::move(candidate);
    return MCSIM_OK;
  });
}

mcsim_status mcsim_scene_add_receiver(mcsim_scene* scene, double x, double y, double z,
                                      double radius, int* out_id) {
  if (scene == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null scene");
  return guarded([&] {
    mcsim::Scene candidate = scene->scene;
    const int id = static_cast<int>(candidate.receivers.size()) + 1;
    candidate.receivers.push_back({id, {x, y, z}, radius});
    candidate.validate();
    scene->scene = std::move(candidate);
    if (out_id != nullptr) *out_id = id;
    return MCSIM_OK;
  });
}

mcsim_status mcsim_scene_validate(const mcsim_scene* scene) {
  if (scene == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null scene");
  return guarded([&] {
    scene->scene.validate();
    return MCSIM_OK;
  });
}

size_t mcsim_scene_receiver_count(const mcsim_scene* scene) {
  return scene == nullptr ? 0 : scene->scene.receivers.size();
}

mcsim_status mcsim_run_batch(const mcsim_scene* scene, mcsim_policy policy,
                             const mcsim_run_options* options, mcsim_batch** out) {
  if (scene == nullptr || options == nullptr || out == nullptr)
    return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<mcsim_batch>();
    handle->result = mcsim::run_batch(scene->scene, to_policy(policy), options->seed,
                                      options->realizations, options->workers);
    *out = handle.release();
    return MCSIM_OK;
  });
}

void mcsim_batch_destroy(mcsim_batch* batch) { delete batch; }

size_t mcsim_batch_sample_count(const mcsim_batch* batch) {
  return batch == nullptr ? 0 : batch->result.curve.times.size();
}

size_t mcsim_batch_receiver_count(const mcsim_batch* batch) {
  return batch == nullptr ? 0 : batch->result.curve.fractions.size();
}

int64_t mcsim_batch_realization_count(const mcsim_batch* batch) {
  return batch == nullptr ? 0 : batch->result.curve.realizations;
}

mcsim_status mcsim_batch_ledger(const mcsim_batch* batch, mcsim_ledger* out) {
  if (batch == nullptr || out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = to_c(batch->result.ledger);
  return MCSIM_OK;
}

mcsim_status mcsim_batch_times(const mcsim_batch* batch, double* out, size_t len) {
  if (auto s = check_len(batch, out, len); s != MCSIM_OK) return s;
  copy_out(std::span<const double>(batch->result.curve.times), out);
  return MCSIM_OK;
}

mcsim_status mcsim_batch_fraction(const mcsim_batch* batch, size_t rx, double* out, size_t len) {
  if (auto s = check_len(batch, out, len); s != MCSIM_OK) return s;
  if (rx >= batch->result.curve.fractions.size())
    return fail(MCSIM_ERR_OUT_OF_RANGE, "receiver index out of range");
  copy_out(std::span<const double>(batch->result.curve.fractions[rx]), out);
  return MCSIM_OK;
}

mcsim_status mcsim_batch_mean_new_absorbed(const mcsim_batch* batch, size_t rx, double* out,
                                           size_t len) {
  if (auto s = check_len(batch, out, len); s != MCSIM_OK) return s;
  if (rx >= batch->result.mean_new_absorbed.size())
    return fail(MCSIM_ERR_OUT_OF_RANGE, "receiver index out of range");
  copy_out(std::span<const double>(batch->result.mean_new_absorbed[rx]), out);
  return MCSIM_OK;
}

mcsim_status mcsim_batch_new_absorbed(const mcsim_batch* batch, int64_t realization, size_t rx,
                                      int64_t* out, size_t len) {
  if (auto s = check_len(batch, out, len); s != MCSIM_OK) return s;
  const auto& reals = batch->result.realizations;
  if (realization < 0 || static_cast<size_t>(realization) >= reals.size())
    return fail(MCSIM_ERR_OUT_OF_RANGE, "realization index out of range");
  const auto& hist = reals[static_cast<size_t>(realization)].histogram.new_absorbed;
  if (rx >= hist.size()) return fail(MCSIM_ERR_OUT_OF_RANGE, "receiver index out of range");
  for (size_t i = 0; i < len; ++i) out[i] = hist[rx][i];
  return MCSIM_OK;
}

mcsim_status mcsim_batch_free_count(const mcsim_batch* batch, int64_t realization, int64_t* out,
                                    size_t len) {
  if (auto s = check_len(batch, out, len); s != MCSIM_OK) return s;
  const auto& reals = batch->result.realizations;
  if (realization < 0 || static_cast<size_t>(realization) >= reals.size())
    return fail(MCSIM_ERR_OUT_OF_RANGE, "realization index out of range");
  const auto& free_count = reals[static_cast<size_t>(realization)].free_count;
  for (size_t i = 0; i < len; ++i) out[i] = free_count[i];
  return MCSIM_OK;
}

int64_t mcsim_batch_outside_violations(const mcsim_batch* batch) {
  if (batch == nullptr) return 0;
  int64_t total = 0;
  for (const auto& r : batch->result.realizations) total += r.outside_violations;
  return total;
}

double mcsim_erfc(double x) { return mcsim::erfc(x); }

mcsim_status mcsim_hitting_fraction(double radius, double distance, double diffusion, double t,
                                    double* out) {
  if (out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = mcsim::hitting_fraction(radius, distance, diffusion, t);
    return MCSIM_OK;
  });
}

double mcsim_planar_intra_step_prob(double l_initial, double l_final, double diffusion, double dt) {
  return mcsim::planar_intra_step_prob(l_initial, l_final, diffusion, dt);
}

mcsim_status mcsim_apriori_prob(double radius, double center_distance, double diffusion, double dt,
                                double* out) {
  if (out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = mcsim::apriori_prob(radius, center_distance, diffusion, dt);
    return MCSIM_OK;
  });
}

mcsim_status mcsim_two_rx_asymptote(double radius, double distance, double tol, int n_max,
                                    mcsim_series_result* out) {
  if (out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const auto r = mcsim::two_rx_asymptote(radius, distance, tol, n_max);
    *out = {r.value, r.terms, r.converged ? 1 : 0, r.last_term};
    if (!r.converged)
      return fail(MCSIM_ERR_NOT_CONVERGED, "series did not reach tolerance within " +
                                               std::to_string(n_max) + " terms");
    return MCSIM_OK;
  });
}

double mcsim_ledger_total(const mcsim_ledger* ledger) {
  if (ledger == nullptr) return 0.0;
  return mcsim::ledger_total({ledger->n_uniform, ledger->n_gaussian});
}

mcsim_status mcsim_r_squared(const double* analytic, const double* simulated, size_t len,
                             double* out) {
  if (analytic == nullptr || simulated == nullptr || out == nullptr)
    return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = mcsim::r_squared({analytic, len}, {simulated, len});
    return MCSIM_OK;
  });
}

mcsim_status mcsim_rmse(const double* analytic, const double* simulated, size_t len, double* out) {
  if (analytic == nullptr || simulated == nullptr || out == nullptr)
    return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = mcsim::rmse({analytic, len}, {simulated, len});
    return MCSIM_OK;
  });
}

mcsim_status mcsim_kappa(double radius, double distance, double diffusion, double dt, double* out) {
  if (out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = mcsim::kappa(radius, distance, diffusion, dt);
    return MCSIM_OK;
  });
}

mcsim_status mcsim_predict_r2(double kappa, mcsim_fit_order order, double* out) {
  if (out == nullptr) return fail(MCSIM_ERR_INVALID_ARGUMENT, "null output");
  if (!(kappa > 0.0)) return fail(MCSIM_ERR_INVALID_ARGUMENT, "kappa must be positive");
  mcsim::FitOrder fit;
  switch (order) {
    case MCSIM_FIT_LINEAR: fit = mcsim::FitOrder::Linear; break;
    case MCSIM_FIT_QUADRATIC: fit = mcsim::FitOrder::Quadratic; break;
    case MCSIM_FIT_CUBIC: fit = mcsim::FitOrder::Cubic; break;
    case MCSIM_FIT_CLAMPED_CUBIC: fit = mcsim::FitOrder::ClampedCubic; break;
    default: return fail(MCSIM_ERR_INVALID_ARGUMENT, "unknown fit order");
  }
  *out = mcsim::predict_r2(kappa, fit);
  return MCSIM_OK;
}

mcsim_status mcsim_measure_one_step(const mcsim_channel* channel, mcsim_policy policy,
                                    const mcsim_run_options* options, mcsim_accuracy* out) {
  if (channel == nullptr || options == nullptr || out == nullptr)
    return fail(MCSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const mcsim::ChannelParams params{channel->diffusion, channel->distance, channel->radius,
                                      channel->time_step, channel->molecules};
    const auto report = mcsim::try_measure_one_step_accuracy(
        params, to_policy(policy), options->seed, options->realizations, options->workers);
    *out = {report.r_squared, report.rmse, report.samples, report.analytic_fraction,
            report.simulated_fraction, to_c(report.ledger)};
    if (report.degenerate)
      return fail(MCSIM_ERR_DEGENERATE_VARIANCE, "one-step measurement: no molecule was absorbed");
    return MCSIM_OK;
  });
}

}  // extern "C"
