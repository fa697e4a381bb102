#include "score.hpp"

#include "normal.hpp"

#include <cmath>
#include <stdexcept>

namespace wbb {

double score(const WeightParams& params, const ScoreInputs& in, bool stabilized) {
    if (!std::isfinite(in.x) || !std::isfinite(in.y)) {
        throw std::invalid_argument("score: endpoint values must be finite");
    }
    if (!(in.m >= 0.0) || !std::isfinite(in.m)) {
        throw std::invalid_argument("score: threshold m must be finite and >= 0");
    }
    const double v = interval_weight(params, in.iv);
    if (v == 0.0) return 0.0; // both expectations vanish since m >= 0
    const double len = in.iv.hi - in.iv.lo;
    const double root = std::sqrt(len);
    const double shift = 2.0 * in.m / v;
    const double sum_xy = in.x + in.y;
    const double a1 = (sum_xy - shift) / root;
    const double a2 = -(sum_xy + shift) / root;
    const double p1 = stabilized ? psi_tilde(a1) : psi(a1);
    const double p2 = stabilized ? psi_tilde(a2) : psi(a2);
    const double s = v * 0.5 * root * (p1 + p2);
    return s > 0.0 ? s : 0.0;
}

} // namespace wbb
