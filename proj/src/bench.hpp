#pragma once

#include "quantile.hpp"
#include "weights.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wbb {

// One row of a convergence benchmark.  `sweep` is n for the strong
// approximation and epsilon for the quantile benchmark; half-widths are
// 0.95 normal-approximation confidence bounds of the Monte Carlo means.
struct BenchRecord {
    double sweep = 0.0;
    std::string engine;
    double eta = 0.0;
    double gamma = 0.0;
    double q = 0.0;
    double error = 0.0;
    double error_hw = 0.0;
    double time_sec = 0.0;
    double time_hw = 0.0;
};

struct BenchConfig {
    WeightParams params;
    Engine engine = Engine::adaptive;
    double q = 0.95;
    int replications = 0; // 0: per-benchmark default (10^3 strong, 10^2 quantile)
    std::uint64_t seed = 0;
    int workers = 0;
};

// Default sweeps matching the studied grids.
std::vector<std::uint64_t> default_strong_sweep(Engine engine);
std::vector<double> default_quantile_sweep();

// Strong-approximation error vs n: per replication one trajectory is refined
// to reference_multiplier * max(sweep) and the coupled gaps to the reference
// value are recorded at every sweep value.  The adaptive engine checkpoints
// one refinement run; the equidistant engine restricts one fine-grid path to
// the nested coarse grids.  Per-call times come from the same refinement
// prefixes (adaptive) or from dedicated timing runs (equidistant).
std::vector<BenchRecord> bench_strong(const BenchConfig& config,
                                      std::span<const std::uint64_t> n_sweep,
                                      int reference_multiplier = 10);

// Quantile error vs epsilon: per sweep value, `replications` runs of
// compute_quantile with distinct seeds; the error is the mean absolute
// deviation from `reference` and the time is the eps-driven sampling stage.
std::vector<BenchRecord> bench_quantile(const BenchConfig& config,
                                        std::span<const double> eps_sweep, double reference,
                                        const EqCalibration* eq_calibration = nullptr);

struct OrderEstimate {
    double slope = 0.0;
    double stderr_ = 0.0;
};

// Least-squares slope of log(error) against log(sweep) or log(time).  Rows
// with non-positive error are excluded (gaps below resolution).
OrderEstimate estimate_order(std::span<const BenchRecord> records, bool vs_time);

// Power-law fit error(n) ~ coeff * n^-order of strong-approximation records,
// as an equidistant calibration row.
EqCalibrationRow fit_calibration(const WeightParams& params,
                                 std::span<const BenchRecord> records);

// CSV schema: sweep,engine,eta,gamma,q,error,error_hw,time_sec,time_hw.
// Numbers are written with 17 significant digits so parsing them back
// reproduces the records exactly.
void write_csv(std::span<const BenchRecord> records, const std::string& path);
std::vector<BenchRecord> read_csv(const std::string& path);

std::string bench_csv_name(const std::string& kind, const BenchConfig& config);

} // namespace wbb
