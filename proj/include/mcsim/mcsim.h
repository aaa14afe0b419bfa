/*
 * mcsim: particle-based simulation of diffusing molecules captured by
 * perfectly absorbing spherical receivers.
 *
 * Plain C interface over the C++ core. Objects are opaque handles created and
 * destroyed through this API. Every fallible call returns an mcsim_status; on
 * failure mcsim_last_error() describes the problem (thread-local, valid until
 * the next failing call on the same thread).
 *
 * Units are SI throughout: meters, seconds, m^2/s.
 */
#ifndef MCSIM_MCSIM_H
#define MCSIM_MCSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MCSIM_BUILDING)
#    define MCSIM_API __declspec(dllexport)
#  else
#    define MCSIM_API __declspec(dllimport)
#  endif
#else
#  define MCSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcsim_status {
  MCSIM_OK = 0,
  MCSIM_ERR_INVALID_ARGUMENT = 1,
  MCSIM_ERR_DEGENERATE_VARIANCE = 2,
  MCSIM_ERR_RETRY_CAP_EXCEEDED = 3,
  MCSIM_ERR_NOT_CONVERGED = 4,
  MCSIM_ERR_OUT_OF_RANGE = 5,
  MCSIM_ERR_INTERNAL = 99
} mcsim_status;

typedef enum mcsim_algorithm {
  MCSIM_SMC = 0,
  MCSIM_RMC = 1,
  MCSIM_LINE_CROSSING = 2,
  MCSIM_APMC = 3
} mcsim_algorithm;

typedef enum mcsim_fit_order {
  MCSIM_FIT_LINEAR = 1,
  MCSIM_FIT_QUADRATIC = 2,
  MCSIM_FIT_CUBIC = 3,
  MCSIM_FIT_CLAMPED_CUBIC = 4
} mcsim_fit_order;

typedef struct mcsim_policy {
  mcsim_algorithm algorithm;
  double xi; /* likelihood threshold in [0, 1) */
} mcsim_policy;

typedef struct mcsim_run_options {
  uint64_t seed;
  int64_t realizations;
  int workers;
} mcsim_run_options;

typedef struct mcsim_ledger {
  uint64_t n_uniform;
  uint64_t n_gaussian;
  double n_total_equivalent; /* n_uniform + (4/pi) n_gaussian */
} mcsim_ledger;

typedef struct mcsim_series_result {
  double value;
  int terms;
  int converged;
  double last_term;
} mcsim_series_result;

typedef struct mcsim_channel {
  double diffusion;
  double distance;
  double radius;
  double time_step;
  int64_t molecules;
} mcsim_channel;

typedef struct mcsim_accuracy {
  double r_squared;
  double rmse;
  int64_t samples;
  double analytic_fraction;
  double simulated_fraction;
  mcsim_ledger ledger;
} mcsim_accuracy;

typedef struct mcsim_scene mcsim_scene;
typedef struct mcsim_batch mcsim_batch;

MCSIM_API const char* mcsim_version(void);
MCSIM_API const char* mcsim_last_error(void);
MCSIM_API const char* mcsim_status_name(mcsim_status status);

/* Parses "smc", "rmc", "line" or "apmc". */
MCSIM_API mcsim_status mcsim_algorithm_from_name(const char* name, mcsim_algorithm* out);
MCSIM_API const char* mcsim_algorithm_name(mcsim_algorithm algorithm);

/* ---- scenes ---------------------------------------------------------- */

/* Transmitter starts at the origin; receivers are added afterwards. */
MCSIM_API mcsim_status mcsim_scene_create(double diffusion, double time_step, int64_t samples,
                                          int64_t molecules, mcsim_scene** out);
MCSIM_API mcsim_status mcsim_scene_clone(const mcsim_scene* scene, mcsim_scene** out);
MCSIM_API void mcsim_scene_destroy(mcsim_scene* scene);
MCSIM_API mcsim_status mcsim_scene_set_transmitter(mcsim_scene* scene, double x, double y, double z);
/* Ids are assigned 1, 2, ... in insertion order. */
MCSIM_API mcsim_status mcsim_scene_add_receiver(mcsim_scene* scene, double x, double y, double z,
                                                double radius, int* out_id);
/* Checks disjoint receivers and a transmitter strictly outside all of them. */
MCSIM_API mcsim_status mcsim_scene_validate(const mcsim_scene* scene);
MCSIM_API size_t mcsim_scene_receiver_count(const mcsim_scene* scene);

/* ---- simulation ------------------------------------------------------ */

MCSIM_API mcsim_status mcsim_run_batch(const mcsim_scene* scene, mcsim_policy policy,
                                       const mcsim_run_options* options, mcsim_batch** out);
MCSIM_API void mcsim_batch_destroy(mcsim_batch* batch);

MCSIM_API size_t mcsim_batch_sample_count(const mcsim_batch* batch);
MCSIM_API size_t mcsim_batch_receiver_count(const mcsim_batch* batch);
MCSIM_API int64_t mcsim_batch_realization_count(const mcsim_batch* batch);
MCSIM_API mcsim_status mcsim_batch_ledger(const mcsim_batch* batch, mcsim_ledger* out);

/* Array accessors copy exactly `len` values, which must equal the sample count. */
MCSIM_API mcsim_status mcsim_batch_times(const mcsim_batch* batch, double* out, size_t len);
/* Cumulative absorbed fraction for receiver index `rx` (0-based). */
MCSIM_API mcsim_status mcsim_batch_fraction(const mcsim_batch* batch, size_t rx, double* out,
                                            size_t len);
/* Per-step newly absorbed molecules, averaged over realizations. */
MCSIM_API mcsim_status mcsim_batch_mean_new_absorbed(const mcsim_batch* batch, size_t rx,
                                                     double* out, size_t len);
MCSIM_API mcsim_status mcsim_batch_new_absorbed(const mcsim_batch* batch, int64_t realization,
                                                size_t rx, int64_t* out, size_t len);
MCSIM_API mcsim_status mcsim_batch_free_count(const mcsim_batch* batch, int64_t realization,
                                              int64_t* out, size_t len);
/* Free molecules observed inside a receiver at any sample, summed over realizations. */
MCSIM_API int64_t mcsim_batch_outside_violations(const mcsim_batch* batch);

/* ---- analytics ------------------------------------------------------- */

MCSIM_API double mcsim_erfc(double x);
MCSIM_API mcsim_status mcsim_hitting_fraction(double radius, double distance, double diffusion,
                                              double t, double* out);
MCSIM_API double mcsim_planar_intra_step_prob(double l_initial, double l_final, double diffusion,
                                              double dt);
MCSIM_API mcsim_status mcsim_apriori_prob(double radius, double center_distance, double diffusion,
                                          double dt, double* out);
/* Returns MCSIM_ERR_NOT_CONVERGED (with the partial sum in *out) when n_max is hit first. */
MCSIM_API mcsim_status mcsim_two_rx_asymptote(double radius, double distance, double tol, int n_max,
                                              mcsim_series_result* out);
MCSIM_API double mcsim_ledger_total(const mcsim_ledger* ledger);

/* ---- metrics --------------------------------------------------------- */

MCSIM_API mcsim_status mcsim_r_squared(const double* analytic, const double* simulated, size_t len,
                                       double* out);
MCSIM_API mcsim_status mcsim_rmse(const double* analytic, const double* simulated, size_t len,
                                  double* out);
MCSIM_API mcsim_status mcsim_kappa(double radius, double distance, double diffusion, double dt,
                                   double* out);
MCSIM_API mcsim_status mcsim_predict_r2(double kappa, mcsim_fit_order order, double* out);
/* On MCSIM_ERR_DEGENERATE_VARIANCE *out still carries rmse and both fractions. */
MCSIM_API mcsim_status mcsim_measure_one_step(const mcsim_channel* channel, mcsim_policy policy,
                                              const mcsim_run_options* options, mcsim_accuracy* out);

#ifdef __cplusplus
}
#endif

#endif
