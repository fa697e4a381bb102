#include "kolmogorov.hpp"

#include <cmath>
#include <stdexcept>

namespace wbb {

double kolmogorov_cdf(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("kolmogorov_cdf: x must be a positive real");
    }
    double sum = 0.0;
    double sign = 1.0;
    for (std::int64_t k = 1;; ++k) {
        const double term = std::exp(-2.0 * static_cast<double>(k) * static_cast<double>(k) * x * x);
        if (term < 1e-14) break;
        sum += sign * term;
        sign = -sign;
    }
    const double cdf = 1.0 - 2.0 * sum;
    // For very small x the partial sums cancel almost completely and rounding
    // can push the result a few ulps outside [0,1].
    if (cdf < 0.0) return 0.0;
    if (cdf > 1.0) return 1.0;
    return cdf;
}

double kolmogorov_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::domain_error("kolmogorov_quantile: q must lie in (0, 1)");
    }
    // kolmogorov_cdf(1e-3) == 0 and kolmogorov_cdf(5) == 1 to double
    // precision, so the bracket contains every quantile of interest.
    double lo = 1e-3;
    double hi = 5.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_cdf(mid) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double darling_erdos_critical(std::int64_t n, double alpha, double sigma,
                              DarlingErdosVariant variant) {
    if (n < 3) {
        throw std::domain_error("darling_erdos_critical: n must be >= 3 (a(log n) degenerates)");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("darling_erdos_critical: alpha must lie in (0, 1)");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::domain_error("darling_erdos_critical: sigma must be positive");
    }
    const double x = std::log(static_cast<double>(n));
    const double a = std::sqrt(2.0 * std::log(x));
    const double b = 2.0 * std::log(x) + 0.5 * std::log(std::log(x)) - 0.5 * std::log(M_PI);
    const double tail = -std::log1p(-alpha); // -log(1-alpha), accurate for small alpha
    const double inner = (variant == DarlingErdosVariant::as_stated)
                             ? -std::log(0.5 * tail)
                             : -std::log(tail);
    return sigma / a * (inner + b);
}

} // namespace wbb
