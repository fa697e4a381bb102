#pragma once

#include "weights.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wbb {

enum class Engine {
    adaptive,
    equidistant,
};

const char* engine_name(Engine e);
Engine engine_from_name(const std::string& name);

// Calibration of the equidistant engine's refinement depth: measured errors
// of the fixed-grid scheme follow e(n) ~ coeff * n^-order, so the depth for a
// tolerance eps is the smallest n with coeff * n^-order <= eps.  The built-in
// rows cover eta = 0, gamma in {0, 0.25, 0.45}; `wbb bench strong
// --engine equidistant --emit-calibration` regenerates rows for other
// parameters.
struct EqCalibrationRow {
    double eta;
    double gamma;
    double coeff;
    double order;
};

struct EqCalibration {
    std::vector<EqCalibrationRow> rows;

    static const EqCalibration& builtin();
    static EqCalibration load(const std::string& path);
    void save(const std::string& path) const;

    std::uint64_t n0_for(const WeightParams& params, double epsilon) const;
};

struct QuantileRequest {
    WeightParams params;
    double q;
    double epsilon;
    std::uint64_t seed = 0;
    Engine engine = Engine::adaptive;
    double ci_level = 0.95;
    int workers = 0;          // <= 0: use available parallelism
    int precompute_m = 1000;  // Monte Carlo samples per n0 candidate
    int i_max = 20;           // n0 candidates are 10 * 2^i, i = 0..i_max
    const EqCalibration* eq_calibration = nullptr; // nullptr: built-in table
};

struct QuantileResult {
    double quantile = 0.0;
    std::uint64_t n0 = 0;
    std::uint64_t k0 = 0;
    bool ci_valid = false;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t order_index = 0;
    double elapsed_sec = 0.0;  // full call, precompute included
    double sampling_sec = 0.0; // the eps-driven stage: k0 draws + selection
    std::uint64_t seed = 0;
};

// k0 = ceil(eps^-2), with a guard so that tolerances whose reciprocal square
// is an integer (up to rounding) do not get bumped by one.
std::uint64_t sample_count_for(double epsilon);

// ceil(q * k), same rounding guard.
std::uint64_t order_index_for(double q, std::uint64_t k);

// Search for the minimal n0 = 10 * 2^i whose mean coupled doubling gap
// X_n = mean of m samples of |A_2n - A_n| (both from one checkpointed
// trajectory) is <= epsilon.  Throws PrecomputeDivergence past i_max.
std::uint64_t precompute_n0(const WeightParams& params, std::uint64_t seed, double epsilon,
                            int m = 1000, int i_max = 20, int workers = 0);

// Value of rank `index` (1-based, ascending) by in-place selection.
double order_statistic(std::vector<double>& samples, std::uint64_t index);

struct BinomialCiIndices {
    std::uint64_t a;
    std::uint64_t b;
    double coverage; // exact binomial coverage P(a <= Z <= b-1)
};

// Order-statistic indices (a, b) with symmetric alpha/2 tails: a is the
// largest index with P(Z < a) <= alpha/2 and b the smallest with
// P(Z >= b) <= alpha/2, Z ~ Binomial(k, q).  [Y_(a), Y_(b)] is then a
// conservative level-(1-alpha) confidence interval for the q-quantile.
// Throws InsufficientSamples when no such pair exists.
BinomialCiIndices binomial_ci_indices(std::uint64_t k, double q, double alpha);

std::pair<double, double> binomial_ci(std::vector<double>& samples, double q, double alpha);

// P(Z <= j) for Z ~ Binomial(k, p), exact up to rounding.
double binomial_cdf(std::uint64_t k, double p, std::int64_t j);

// Full pipeline: precompute n0, draw k0 = ceil(eps^-2) independent samples of
// A_{n0}(w, B) with the selected engine, return the ceil(q k0)-th order
// statistic with its order-statistic confidence interval.  Bit-reproducible
// for a fixed request, independent of the worker count.
QuantileResult compute_quantile(const QuantileRequest& req);

// The eps-driven sampling stage in isolation: k0 samples of A_{n0} on the
// streams (seed, 0..k0) plus the order-statistic selection.  Produces the
// same value as compute_quantile for matching inputs; the benchmark harness
// re-runs it to time the stage cleanly.
double quantile_sampling_value(const WeightParams& params, Engine engine, std::uint64_t seed,
                               std::uint64_t n0, std::uint64_t k0, double q, int workers);

} // namespace wbb
