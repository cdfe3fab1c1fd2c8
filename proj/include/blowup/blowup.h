/*
 * libblowup: collapse of charge-one sigma-model solitons in 2+1 dimensions.
 *
 * Plain C interface over the C++ core. Every object is an opaque handle that
 * the caller releases with the matching *_free function. Every fallible call
 * returns a blowup_status; on failure blowup_last_error() returns a message
 * describing the most recent failure on the calling thread.
 *
 * Distinct handles may be used concurrently from different threads. A single
 * handle is read-only after creation and may be shared between threads.
 */
#ifndef BLOWUP_BLOWUP_H
#define BLOWUP_BLOWUP_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(BLOWUP_BUILDING_LIBRARY)
#    define BLOWUP_API __declspec(dllexport)
#  else
#    define BLOWUP_API __declspec(dllimport)
#  endif
#else
#  define BLOWUP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum blowup_status {
  BLOWUP_OK = 0,
  BLOWUP_ERR_INVALID_ARGUMENT = 1,
  BLOWUP_ERR_CONTRACT = 2,
  BLOWUP_ERR_BLOW_UP_PASSED = 3,
  BLOWUP_ERR_DOMAIN = 4,
  BLOWUP_ERR_NUMERICAL = 5,
  BLOWUP_ERR_INSUFFICIENT_DATA = 6,
  BLOWUP_ERR_SINGULAR_FIT = 7,
  BLOWUP_ERR_EXTRACTION_UNDEFINED = 8,
  BLOWUP_ERR_FIT_FAILED = 9,
  BLOWUP_ERR_OUT_OF_RANGE = 10,
  BLOWUP_ERR_IO = 11,
  BLOWUP_ERR_INTERNAL = 12
} blowup_status;

typedef enum blowup_halt_reason {
  BLOWUP_HALT_REACHED_STOP_HEIGHT = 0,
  BLOWUP_HALT_MAX_STEPS = 1,
  BLOWUP_HALT_BLOW_UP_PASSED = 2
} blowup_halt_reason;

BLOWUP_API const char* blowup_version(void);
BLOWUP_API const char* blowup_status_name(blowup_status status);
BLOWUP_API const char* blowup_halt_reason_name(blowup_halt_reason reason);
/* Message for the last failed call on this thread; "" if none. */
BLOWUP_API const char* blowup_last_error(void);

/* ---- simulation ------------------------------------------------------- */

typedef struct blowup_sim_config {
  double f0;
  double v0;
  double dr;
  double dt;
  double r_max;
  int corrector_iters;
  double stop_height;   /* <= 0 selects the default 0.05 * f0 */
  long long max_steps;
  int sample_every;
  const double* slice_times; /* borrowed; may be NULL when n_slice_times == 0 */
  size_t n_slice_times;
} blowup_sim_config;

/* f0 = 1, v0 = -0.01, dr = 0.01, dt = 0.001, r_max = 100, 4 corrector
 * passes, default stop height, 10^7 steps, every step sampled, no slices. */
BLOWUP_API void blowup_sim_config_default(blowup_sim_config* cfg);
BLOWUP_API blowup_status blowup_sim_config_validate(const blowup_sim_config* cfg);

typedef struct blowup_run blowup_run;

/* Runs to the stop height, max_steps or the blow-up. Passing the blow-up is
 * reported through blowup_run_halt_reason, not as an error status. */
BLOWUP_API blowup_status blowup_run_simulation(const blowup_sim_config* cfg, blowup_run** out);
BLOWUP_API void blowup_run_free(blowup_run* run);

BLOWUP_API blowup_halt_reason blowup_run_halt_reason(const blowup_run* run);
BLOWUP_API long long blowup_run_steps(const blowup_run* run);
BLOWUP_API double blowup_run_halt_time(const blowup_run* run);
BLOWUP_API size_t blowup_run_grid_size(const blowup_run* run);
BLOWUP_API double blowup_run_r_max(const blowup_run* run);

/* Writes trace.csv, slices.csv and finally manifest.csv into dir (created
 * if missing). */
BLOWUP_API blowup_status blowup_run_write_artifacts(const blowup_run* run, const char* dir);

/* ---- origin traces ----------------------------------------------------- */

typedef struct blowup_trace blowup_trace;

BLOWUP_API blowup_status blowup_trace_from_run(const blowup_run* run, blowup_trace** out);
BLOWUP_API blowup_status blowup_trace_from_arrays(const double* t, const double* f, size_t n,
                                                  blowup_trace** out);
BLOWUP_API blowup_status blowup_trace_load(const char* path, blowup_trace** out);
BLOWUP_API blowup_status blowup_trace_save(const blowup_trace* trace, const char* path);
BLOWUP_API void blowup_trace_free(blowup_trace* trace);
BLOWUP_API size_t blowup_trace_size(const blowup_trace* trace);
/* Copies min(capacity, size) samples; either output pointer may be NULL. */
BLOWUP_API size_t blowup_trace_copy(const blowup_trace* trace, double* t, double* f, size_t capacity);

/* Centred-difference velocity at interior samples (n - 2 values). Returns
 * the number written, at most `capacity`; outputs may be NULL. */
BLOWUP_API size_t blowup_trace_velocity_copy(const blowup_trace* trace, double* t, double* f,
                                             double* dfdt, size_t capacity);

/* ---- line fits and (c, R) extraction ----------------------------------- */

typedef struct blowup_linear_fit {
  double slope;
  double intercept;
  double rms_residual;
  size_t n_points;
} blowup_linear_fit;

BLOWUP_API blowup_status blowup_linear_fit_points(const double* x, const double* y, size_t n,
                                                  blowup_linear_fit* out);

typedef struct blowup_window {
  double t_lo;
  double t_hi;
} blowup_window;

/* Default window: skip the first 5% of the trace and samples below
 * 1.5 * stop_height. whole_trace != 0 returns the full time span. */
BLOWUP_API blowup_status blowup_extraction_window(const blowup_trace* trace, double stop_height,
                                                  int whole_trace, blowup_window* out);

typedef struct blowup_cutoff {
  double c;
  double R;
  blowup_linear_fit fit;
  blowup_window window;
  double f0; /* first trace sample; carried into fit.csv */
} blowup_cutoff;

BLOWUP_API blowup_status blowup_extract_cutoff(const blowup_trace* trace, const blowup_window* window,
                                               blowup_cutoff* out);
/* c and R from an existing line y = m x + b in the (ln f, 1/f_t^2) plane. */
BLOWUP_API blowup_status blowup_cutoff_from_line(double slope, double intercept, blowup_cutoff* out);
BLOWUP_API blowup_status blowup_cutoff_save(const blowup_cutoff* fit, const char* path);
BLOWUP_API blowup_status blowup_cutoff_load(const char* path, blowup_cutoff* out);

/* ---- adiabatic prediction --------------------------------------------- */

typedef struct blowup_geodesic_model {
  double c;
  double R;
  double f0;
} blowup_geodesic_model;

BLOWUP_API blowup_status blowup_geodesic_integrand(double f, double R, double* out);
BLOWUP_API blowup_status blowup_collapse_time(const blowup_geodesic_model* model, double f_target,
                                              double* t_out);
BLOWUP_API blowup_status blowup_max_predictable_time(const blowup_geodesic_model* model, double* t_out);
BLOWUP_API blowup_status blowup_predict_height(const blowup_geodesic_model* model, double t,
                                               double* f_out);
BLOWUP_API blowup_status blowup_predicted_velocity(const blowup_geodesic_model* model, double f,
                                                   double* v_out);

/* ---- time slices and hyperbola fits ------------------------------------ */

typedef struct blowup_slices blowup_slices;

BLOWUP_API blowup_status blowup_slices_from_run(const blowup_run* run, blowup_slices** out);
BLOWUP_API blowup_status blowup_slices_load(const char* path, blowup_slices** out);
BLOWUP_API void blowup_slices_free(blowup_slices* slices);
BLOWUP_API size_t blowup_slices_count(const blowup_slices* slices);
BLOWUP_API double blowup_slices_time(const blowup_slices* slices, size_t index);
BLOWUP_API size_t blowup_slices_length(const blowup_slices* slices, size_t index);
BLOWUP_API size_t blowup_slices_copy(const blowup_slices* slices, size_t index, double* r, double* f,
                                     size_t capacity);

typedef struct blowup_hyperbola {
  double a;
  double b;
  double k;
  double rms_residual;
  double window_r;
  double minus_b_over_a;
  int iterations;
} blowup_hyperbola;

/* Fits y = k + b sqrt(1 + r^2/a^2) over r <= window_r. init may be NULL. */
BLOWUP_API blowup_status blowup_hyperbola_fit(const double* r, const double* f, size_t n,
                                              double window_r, const blowup_hyperbola* init,
                                              blowup_hyperbola* out);
BLOWUP_API blowup_status blowup_hyperbola_fit_slice(const blowup_slices* slices, size_t index,
                                                    double window_r, const blowup_hyperbola* init,
                                                    blowup_hyperbola* out);
/* hyperbola.csv: T,a,b,k,minus_b_over_a,rms */
BLOWUP_API blowup_status blowup_hyperbola_series_save(const double* times, const blowup_hyperbola* fits,
                                                      size_t n, const char* path);

/* ---- sweeps ------------------------------------------------------------ */

typedef struct blowup_sweep blowup_sweep;

typedef struct blowup_sweep_row {
  double f0;
  double v0;
  double dr;
  double dt;
  double r_max;
  blowup_halt_reason halt_reason;
  blowup_status status; /* BLOWUP_OK when c and R are valid */
  blowup_cutoff cutoff;
} blowup_sweep_row;

/* Runs each config on up to `jobs` threads and extracts (c, R) with the
 * default window. With out_root != NULL, row i writes trace.csv, slices.csv,
 * fit.csv and manifest.csv into out_root/row_<iii>. Per-row failures are
 * recorded in the rows; the call itself fails only on bad arguments. */
BLOWUP_API blowup_status blowup_sweep_run(const blowup_sim_config* configs, size_t n, unsigned jobs,
                                          const char* out_root, blowup_sweep** out);
BLOWUP_API void blowup_sweep_free(blowup_sweep* sweep);
BLOWUP_API size_t blowup_sweep_size(const blowup_sweep* sweep);
BLOWUP_API blowup_status blowup_sweep_row_get(const blowup_sweep* sweep, size_t index, blowup_sweep_row* out);
/* Error message of a failed row ("" for successful rows). */
BLOWUP_API const char* blowup_sweep_row_error(const blowup_sweep* sweep, size_t index);
BLOWUP_API blowup_status blowup_sweep_save(const blowup_sweep* sweep, const char* path);
/* Aligned text table, NUL terminated. Returns the length needed excluding
 * the terminator; writes at most `capacity` bytes. */
BLOWUP_API size_t blowup_sweep_format(const blowup_sweep* sweep, char* buffer, size_t capacity);

/* ---- generic CSV output ------------------------------------------------ */

/* One header row, then n_rows rows of n_cols doubles (row-major), using the
 * library's 17-significant-digit float format. */
BLOWUP_API blowup_status blowup_csv_save(const char* path, const char* const* header, size_t n_cols,
                                         const double* values, size_t n_rows);
/* Writes the 17-digit rendering of value into buffer (>= 32 bytes). */
BLOWUP_API void blowup_format_double(double value, char* buffer, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif /* BLOWUP_BLOWUP_H */
