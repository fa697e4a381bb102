/* wbb — quantiles of the supremum of weighted reflecting Brownian bridges,
 * with weighted CUSUM change-point tests on top.
 *
 * Plain C interface over the C++ core: opaque handles, integer status codes,
 * value structs.  All functions return WBB_OK (0) on success or a negative
 * code; wbb_last_error() describes the most recent failure on the calling
 * thread.
 */
#ifndef WBB_H
#define WBB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum wbb_status {
    WBB_OK = 0,
    WBB_ERR_INVALID_ARGUMENT = -1, /* bad parameters / configuration */
    WBB_ERR_DOMAIN = -2,           /* argument outside a function's domain */
    WBB_ERR_DIVERGENCE = -3,       /* precompute step found no n0 */
    WBB_ERR_DATA = -4,             /* malformed observation data */
    WBB_ERR_IO = -5,               /* file system failure */
    WBB_ERR_INSUFFICIENT = -6,     /* too few samples for the requested CI */
    WBB_ERR_INTERNAL = -7,
};

const char* wbb_version(void);

/* Message for the last failure on this thread; empty string if none. */
const char* wbb_last_error(void);

/* ---- reference distributions ---------------------------------------- */

int wbb_std_normal_cdf(double x, double* out);
int wbb_kolmogorov_cdf(double x, double* out);
int wbb_kolmogorov_quantile(double q, double* out);

enum wbb_de_variant {
    WBB_DE_AS_STATED = 0,
    WBB_DE_ONE_SIDED = 1,
};

int wbb_darling_erdos_critical(int64_t n, double alpha, double sigma, int variant, double* out);

/* ---- supremum approximation ------------------------------------------ */

enum wbb_engine {
    WBB_ENGINE_ADAPTIVE = 0,
    WBB_ENGINE_EQUIDISTANT = 1,
};

/* One approximation of sup w|B| on the stream (seed, stream). */
int wbb_sup_approx(double eta, double gamma, int engine, uint64_t seed, uint64_t stream,
                   uint64_t n, double* out);

/* ---- quantile computation -------------------------------------------- */

typedef struct wbb_quantile_request {
    double eta;
    double gamma;
    double q;
    double epsilon;
    double ci_level;      /* default 0.95 */
    uint64_t seed;
    int engine;           /* wbb_engine */
    int workers;          /* <= 0: available parallelism */
    int precompute_m;     /* default 1000 */
    int i_max;            /* default 20 */
    const char* eq_calibration_path; /* NULL: built-in table */
} wbb_quantile_request;

typedef struct wbb_quantile_result {
    double quantile;
    uint64_t n0;
    uint64_t k0;
    int ci_valid;
    double ci_lo;
    double ci_hi;
    uint64_t order_index;
    double elapsed_sec;  /* full call including the n0 precompute */
    double sampling_sec; /* k0 sample draws plus order-statistic selection */
    uint64_t seed;
} wbb_quantile_result;

/* Fill a request with defaults (q = 0.95, epsilon = 1e-2, adaptive engine). */
void wbb_quantile_request_init(wbb_quantile_request* req);

int wbb_compute_quantile(const wbb_quantile_request* req, wbb_quantile_result* out);

/* ---- change-point test ------------------------------------------------ */

typedef struct wbb_series wbb_series; /* opaque observation series */

/* column == NULL reads one value per line; otherwise the named CSV column. */
int wbb_series_read(const char* path, const char* column, wbb_series** out);
int wbb_series_from_array(const double* xs, size_t n, wbb_series** out);
void wbb_series_free(wbb_series* series);
int wbb_series_size(const wbb_series* series, size_t* out);

enum wbb_critical_source {
    WBB_CRITICAL_MONTE_CARLO = 0,
    WBB_CRITICAL_KOLMOGOROV = 1,
    WBB_CRITICAL_DARLING_ERDOS = 2,
};

typedef struct wbb_test_options {
    double eta;
    double gamma;
    double alpha;
    double sigma;        /* <= 0: estimate from first differences */
    int critical_source; /* wbb_critical_source */
    double epsilon;      /* Monte Carlo critical value tolerance */
    uint64_t seed;
    int workers;
    int de_variant; /* wbb_de_variant, for the darling-erdos source */
} wbb_test_options;

typedef struct wbb_test_result {
    double statistic;      /* T_n(w) / sigma */
    double critical_value; /* c, on the scale of T_n(w) */
    int reject;
    uint64_t argmax_k; /* 0 when the index window is empty */
    double sigma;
    int sigma_estimated;
} wbb_test_result;

void wbb_test_options_init(wbb_test_options* opt);

int wbb_run_test(const wbb_series* series, const wbb_test_options* opt, wbb_test_result* out);

/* Per-split weighted values w(k/n)|T_{k,n}|/sqrt(n) for k = 1..n-1; `values`
 * must hold n-1 doubles. */
int wbb_cusum_values(const wbb_series* series, double eta, double gamma, double* values);

/* Threshold curve f(t) = c (t(1-t))^gamma on `points` uniform grid values;
 * both arrays must hold `points` doubles. */
int wbb_threshold_curve(double gamma, double c, int points, double* ts, double* fs);

/* ---- benchmarks -------------------------------------------------------- */

typedef struct wbb_bench_result {
    double slope_vs_sweep;
    double slope_vs_sweep_se;
    double slope_vs_time;
    double slope_vs_time_se;
    char csv_path[1024];
} wbb_bench_result;

/* Strong-approximation error vs n.  n_sweep == NULL selects the default
 * sweep.  Writes one CSV under out_dir and reports log-log slopes.
 * emit_calibration (optional, equidistant engine) writes a power-law fit of
 * the measured errors as a calibration file for the equidistant quantile
 * engine. */
int wbb_bench_strong(double eta, double gamma, int engine, const uint64_t* n_sweep,
                     size_t n_count, int replications, int reference_multiplier, uint64_t seed,
                     int workers, const char* out_dir, const char* emit_calibration,
                     wbb_bench_result* out);

/* Quantile error vs epsilon against a reference value for the true quantile.
 * eps_sweep == NULL selects the default sweep 0.64 * 0.8^j down to 1e-2. */
int wbb_bench_quantile(double eta, double gamma, double q, int engine, const double* eps_sweep,
                       size_t eps_count, int replications, double reference, uint64_t seed,
                       int workers, const char* out_dir, const char* eq_calibration_path,
                       wbb_bench_result* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WBB_H */
