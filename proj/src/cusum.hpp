#pragma once

#include "kolmogorov.hpp"
#include "weights.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wbb {

// An observed series xi_1..xi_n with the residual standard deviation, either
// user-supplied or estimated from first differences.
struct SeriesSample {
    std::vector<double> xs;
    double sigma = 1.0;
    bool sigma_estimated = false;
};

// Reads one observation per line, or the named column of a CSV file when
// `column` is non-empty.  Non-numeric rows are a hard error.
std::vector<double> read_series(const std::string& path, const std::string& column = "");

// Plug-in scale estimate: sample standard deviation of first differences
// divided by sqrt(2).  Not part of the tested theory; flagged in output.
double estimate_sigma(std::span<const double> xs);

SeriesSample make_series(std::vector<double> xs, double sigma);
SeriesSample make_series_estimated(std::vector<double> xs);

// Centered partial sum T_{k,n} = sum_{i<=k} xi_i - (k/n) sum_{i<=n} xi_i.
double cusum_partial(std::span<const double> xs, std::uint64_t k);

// Weighted CUSUM statistic T_n(w) = max_{1<=k<n} w(k/n) |T_{k,n}| / sqrt(n),
// with the strict index window eta*n < k < (1-eta)*n.
double cusum_statistic(std::span<const double> xs, const WeightParams& params);

// The per-split weighted values w(k/n)|T_{k,n}|/sqrt(n) for k = 1..n-1, zero
// outside the index window.  Raw eta/gamma so gamma = 1/2 works here too.
std::vector<double> cusum_weighted_values(std::span<const double> xs, double eta, double gamma);

enum class CriticalSource {
    monte_carlo,   // quantile of sup w|B| from the adaptive sampler
    kolmogorov,    // series c.d.f.; only for eta = 0, gamma = 0
    darling_erdos, // asymptotic formula; only for gamma = 1/2
};

const char* critical_source_name(CriticalSource s);
CriticalSource critical_source_from_name(const std::string& name);

struct CusumTestConfig {
    double eta = 0.0;
    double gamma = 0.0;
    double alpha = 0.05;
    CriticalSource source = CriticalSource::monte_carlo;
    double epsilon = 1e-2; // tolerance of the Monte Carlo critical value
    std::uint64_t seed = 0;
    int workers = 0;
    DarlingErdosVariant variant = DarlingErdosVariant::as_stated;
    bool keep_values = false; // record w(k/n)|T_{k,n}|/sqrt(n) for every k
};

struct TestOutcome {
    double statistic = 0.0;      // T_n(w) / sigma
    double critical_value = 0.0; // c, on the scale of T_n(w)
    bool reject = false;
    std::uint64_t argmax_k = 0;  // 0 when the window is empty
    double sigma = 1.0;
    bool sigma_estimated = false;
    std::vector<double> weighted_values; // filled when keep_values is set
};

// Level-alpha change-point test: rejects iff |T_{k,n}|/sqrt(n) exceeds
// c * (k/n (1-k/n))^gamma for some k in the window, with c determined by the
// selected critical-value source (scaled by sigma).
TestOutcome run_test(const SeriesSample& series, const CusumTestConfig& config);

// Threshold curve f(t) = c * (t(1-t))^gamma on a uniform grid of `points`
// values covering [0, 1], for plotting against |T_{k,n}|/sqrt(n).  Takes raw
// gamma in [0, 1/2] because the gamma = 1/2 curve is a legitimate plot even
// though no WeightParams exists for (0, 1/2).
std::vector<std::pair<double, double>> threshold_curve(double gamma, double c, int points);

} // namespace wbb
