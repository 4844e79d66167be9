/*
 * hsicwb C API
 *
 * Kernel (HSIC) tests of independence and mean independence for series of
 * curves or vectors, calibrated with a dependent Gaussian wild bootstrap.
 *
 * Conventions:
 *   - Every fallible function returns hsicwb_status; HSICWB_OK is 0.
 *   - On failure, hsicwb_last_error() returns a message for the calling
 *     thread, valid until the next API call on that thread.
 *   - Objects are opaque handles released with their *_free function;
 *     passing NULL to a *_free function is a no-op.
 *   - Strings returned through char** are owned by the caller and released
 *     with hsicwb_string_free.
 */
#ifndef HSICWB_H
#define HSICWB_H

#include <stddef.h>
#include <stdint.h>

#if defined(HSICWB_BUILDING_LIBRARY)
#define HSICWB_API __attribute__((visibility("default")))
#else
#define HSICWB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hsicwb_status {
  HSICWB_OK = 0,
  HSICWB_ERR_INVALID_ARGUMENT = 1, /* NULL handle or out-pointer */
  HSICWB_ERR_CONFIG = 2,           /* bad preset, kernel, rule, alpha, ... */
  HSICWB_ERR_DATA = 3,             /* malformed or non-finite input data */
  HSICWB_ERR_DIMENSION = 4,        /* shape mismatch between inputs */
  HSICWB_ERR_DEGENERATE = 5,       /* e.g. no positive median bandwidth */
  HSICWB_ERR_INSUFFICIENT = 6,     /* e.g. lag not smaller than n */
  HSICWB_ERR_NUMERICAL = 7,        /* factorization failure */
  HSICWB_ERR_IO = 8,               /* file cannot be read or written */
  HSICWB_ERR_INTERNAL = 9
} hsicwb_status;

typedef struct hsicwb_sample hsicwb_sample;
typedef struct hsicwb_report hsicwb_report;
typedef struct hsicwb_table hsicwb_table;

HSICWB_API const char* hsicwb_version(void);
HSICWB_API const char* hsicwb_last_error(void);
HSICWB_API const char* hsicwb_status_name(hsicwb_status status);
HSICWB_API void hsicwb_string_free(char* s);

/* ---- samples ---------------------------------------------------------- */

/* First-row handling for CSV input. */
typedef enum hsicwb_grid_row {
  HSICWB_GRID_ROW_AUTO = 0,
  HSICWB_GRID_ROW_PRESENT = 1,
  HSICWB_GRID_ROW_ABSENT = 2
} hsicwb_grid_row;

/* vector != 0: columns are coordinates in R^d (uniform weights 1/d) rather
 * than curve values on a uniform trapezoid grid. */
HSICWB_API hsicwb_status hsicwb_sample_read_csv(const char* path,
                                                hsicwb_grid_row grid_row,
                                                int vector,
                                                hsicwb_sample** out);

/* Row-major n x m values. grid_points may be NULL (uniform grid, or vector
 * weights when vector != 0). */
HSICWB_API hsicwb_status hsicwb_sample_from_values(const double* values,
                                                   size_t n, size_t m,
                                                   const double* grid_points,
                                                   int vector,
                                                   hsicwb_sample** out);

HSICWB_API size_t hsicwb_sample_rows(const hsicwb_sample* s);
HSICWB_API size_t hsicwb_sample_cols(const hsicwb_sample* s);
/* Copies the row-major values into `out` (rows*cols doubles). */
HSICWB_API hsicwb_status hsicwb_sample_values(const hsicwb_sample* s,
                                              double* out, size_t capacity);
HSICWB_API hsicwb_status hsicwb_sample_write_csv(const hsicwb_sample* s,
                                                 const char* path,
                                                 int include_grid_row);
/* CSV text of the sample. */
HSICWB_API hsicwb_status hsicwb_sample_to_csv(const hsicwb_sample* s,
                                              int include_grid_row,
                                              char** out);
HSICWB_API void hsicwb_sample_free(hsicwb_sample* s);

/* ---- statistics ------------------------------------------------------- */

/* HSIC_n (rounding-level negatives clamped to 0) for a preset (MDD, KCMD_G,
 * DCOV, HSIC_G) or, when preset is NULL, the kernel pair kernel_x/kernel_y (linear, distance, gaussian:median,
 * gaussian:<bandwidth_sq>). */
HSICWB_API hsicwb_status hsicwb_hsic(const hsicwb_sample* x,
                                     const hsicwb_sample* y,
                                     const char* preset, const char* kernel_x,
                                     const char* kernel_y, double* out);

typedef struct hsicwb_test_options {
  const char* preset;   /* default "MDD"; NULL selects kernel_x/kernel_y */
  const char* kernel_x; /* used when preset is NULL */
  const char* kernel_y;
  double alpha;        /* default 0.05 */
  const char* ln_rule; /* default "scaled:2"; fixed:<k>, scaled:<c>, <k> */
  size_t n_b;          /* default 1000 */
  uint64_t seed;       /* default 1 */
} hsicwb_test_options;

HSICWB_API void hsicwb_test_options_init(hsicwb_test_options* options);

HSICWB_API hsicwb_status hsicwb_test(const hsicwb_sample* x,
                                     const hsicwb_sample* y,
                                     const hsicwb_test_options* options,
                                     hsicwb_report** out);

/* One report per lag, written to out[0..n_lags). On failure no report is
 * returned. */
HSICWB_API hsicwb_status hsicwb_autodep(const hsicwb_sample* y,
                                        const size_t* lags, size_t n_lags,
                                        const hsicwb_test_options* options,
                                        hsicwb_report** out);

HSICWB_API double hsicwb_report_statistic(const hsicwb_report* r);
HSICWB_API double hsicwb_report_quantile(const hsicwb_report* r);
HSICWB_API double hsicwb_report_p_value(const hsicwb_report* r);
HSICWB_API int hsicwb_report_reject(const hsicwb_report* r);
HSICWB_API size_t hsicwb_report_block_length(const hsicwb_report* r);
HSICWB_API size_t hsicwb_report_replicate_count(const hsicwb_report* r);
HSICWB_API const double* hsicwb_report_replicates(const hsicwb_report* r);
HSICWB_API hsicwb_status hsicwb_report_to_json(const hsicwb_report* r,
                                               int include_replicates,
                                               int indent, char** out);
HSICWB_API const char* hsicwb_report_csv_header(void);
HSICWB_API hsicwb_status hsicwb_report_to_csv_row(const hsicwb_report* r,
                                                  char** out);
HSICWB_API void hsicwb_report_free(hsicwb_report* r);

/* ---- simulation ------------------------------------------------------- */

typedef struct hsicwb_dgp_options {
  const char* name; /* har1, setar, fgarch, gp, wiener, concurrent */
  size_t n;         /* default 100 */
  size_t m;         /* grid points, default 1001 */
  size_t burn_in;   /* default 100 */
  uint64_t seed;    /* default 1 */
  double gamma1;    /* har1 */
  int g2, g3, g4;   /* concurrent */
} hsicwb_dgp_options;

HSICWB_API void hsicwb_dgp_options_init(hsicwb_dgp_options* options);

/* Draws a sample. `y` receives the response for concurrent designs and must
 * be non-NULL there; for the single-series designs it is set to NULL when
 * given. `sidecar_json` (optional) receives the configuration record. */
HSICWB_API hsicwb_status hsicwb_simulate(const hsicwb_dgp_options* options,
                                         hsicwb_sample** x, hsicwb_sample** y,
                                         char** sidecar_json);

/* Largest singular value of the discretized gamma * min(t, t') operator on
 * an m-point uniform grid. */
HSICWB_API hsicwb_status hsicwb_min_kernel_norm(double gamma, size_t m,
                                                double* out);

/* ---- Monte Carlo replication ------------------------------------------ */

/* Newline-separated built-in scenario names. */
HSICWB_API const char* hsicwb_scenario_names(void);

typedef struct hsicwb_replicate_options {
  int full;             /* 1000 replications, 1000 resamples, n up to 1000 */
  size_t workers;       /* 0: HSICWB_THREADS or hardware concurrency */
  size_t mc_reps;       /* 0: keep the scenario value */
  size_t n_b;           /* 0: keep the scenario value */
  int override_seed;    /* non-zero: use `seed` as master seed */
  uint64_t seed;
} hsicwb_replicate_options;

HSICWB_API void hsicwb_replicate_options_init(hsicwb_replicate_options* o);

/* Runs a built-in scenario (config_json NULL) or one from a JSON config;
 * `name` may be NULL when the config holds a single scenario. */
HSICWB_API hsicwb_status hsicwb_replicate(const char* name,
                                          const char* config_json,
                                          const hsicwb_replicate_options* o,
                                          hsicwb_table** out);

HSICWB_API hsicwb_status hsicwb_table_to_csv(const hsicwb_table* t,
                                             char** out);
HSICWB_API hsicwb_status hsicwb_table_to_json(const hsicwb_table* t,
                                              char** out);
HSICWB_API hsicwb_status hsicwb_scenario_to_json(const char* name, int full,
                                                 char** out);
HSICWB_API void hsicwb_table_free(hsicwb_table* t);

#ifdef __cplusplus
}
#endif

#endif /* HSICWB_H */
