#pragma once

#include <cstdint>

namespace wbb {

// C.d.f. of the Kolmogorov distribution, the law of sup |B| for a standard
// Brownian bridge B:  K(x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
// The alternating series is truncated once the next term drops below 1e-14,
// which bounds the truncation error by that term.
double kolmogorov_cdf(double x);

// Inverse of kolmogorov_cdf via bracketed bisection to |dx| <= 1e-10.
double kolmogorov_quantile(double q);

enum class DarlingErdosVariant {
    // Theorem formula verbatim: inner term -log(-1/2 log(1-alpha)).
    as_stated,
    // Inner term -log(-log(1-alpha)); reproduces the worked example values
    // 3.241 (n=10^2) and 3.353 (n=10^3) at alpha=0.05, sigma=1.
    one_sided,
};

// Asymptotic critical value of the Darling-Erdos theorem for the weight
// (t(1-t))^{-1/2}:  sigma/a(log n) * (inner + b(log n)) with
// a(x) = sqrt(2 log x) and b(x) = 2 log x + 1/2 log log x - 1/2 log pi.
// Requires n >= 3 so that log log n > 0.
double darling_erdos_critical(std::int64_t n, double alpha, double sigma,
                              DarlingErdosVariant variant = DarlingErdosVariant::as_stated);

} // namespace wbb
