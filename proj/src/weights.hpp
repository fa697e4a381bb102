#pragma once

#include <cmath>
#include <stdexcept>

namespace wbb {

// Parameters of the weight family w_{eta,gamma}(t) = 1_(eta,1-eta)(t) * (t(1-t))^-gamma.
// The pair (0, 1/2) is excluded: there sup w|B| is almost surely infinite and
// no quantile exists.
struct WeightParams {
    double eta;
    double gamma;

    WeightParams(double eta_, double gamma_) : eta(eta_), gamma(gamma_) {
        if (!(eta >= 0.0 && eta < 0.5)) {
            throw std::invalid_argument("WeightParams: eta must lie in [0, 1/2)");
        }
        if (!(gamma >= 0.0 && gamma <= 0.5)) {
            throw std::invalid_argument("WeightParams: gamma must lie in [0, 1/2]");
        }
        if (eta == 0.0 && gamma == 0.5) {
            throw std::invalid_argument(
                "WeightParams: (eta, gamma) = (0, 1/2) is excluded; the limit "
                "supremum is almost surely infinite (use the Darling-Erdos "
                "critical value for that case)");
        }
    }
};

struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
            throw std::invalid_argument("Interval: need 0 <= lo < hi <= 1");
        }
    }
};

inline double midpoint(const Interval& iv) { return 0.5 * (iv.lo + iv.hi); }

// w_{eta,gamma}(t) for t strictly inside (0,1).  The indicator is open: t at
// exactly eta or 1-eta yields 0.
inline double weight(const WeightParams& p, double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw std::domain_error("weight: t must lie in (0, 1)");
    }
    if (t <= p.eta || t >= 1.0 - p.eta) return 0.0;
    if (p.gamma == 0.0) return 1.0;
    return std::pow(t * (1.0 - t), -p.gamma);
}

// Interval weight v(lo,hi): zero only when the whole interval sits inside the
// dead zone [0,eta] u [1-eta,1]; otherwise the midpoint power value, even if
// the midpoint itself falls in the dead zone.  This intentionally keeps the
// score from collapsing on intervals that straddle the window boundary.
inline double interval_weight(const WeightParams& p, const Interval& iv) {
    if (iv.hi <= p.eta || iv.lo >= 1.0 - p.eta) return 0.0;
    if (p.gamma == 0.0) return 1.0;
    const double c = midpoint(iv);
    return std::pow(c * (1.0 - c), -p.gamma);
}

} // namespace wbb
