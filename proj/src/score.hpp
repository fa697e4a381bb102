#pragma once

#include "weights.hpp"

namespace wbb {

// Inputs of the greedy score: a subinterval, the bridge values at its
// endpoints and the current discrete maximum m >= 0.
struct ScoreInputs {
    Interval iv;
    double x;
    double y;
    double m;
};

// Score of a subinterval: with v = interval_weight and Z the conditional
// (normal) law of the bridge at the midpoint,
//   score = E (v Z - m)^+  +  E (v Z + m)^-,
// evaluated in closed form as
//   v * sqrt(hi-lo)/2 * ( psi((x+y-2m/v)/sqrt(hi-lo)) + psi(-(x+y+2m/v)/sqrt(hi-lo)) ).
// Production scoring uses the tail-stabilized psi_tilde; `stabilized = false`
// switches to plain psi and exists for oracle comparisons in tests.
double score(const WeightParams& params, const ScoreInputs& in, bool stabilized = true);

} // namespace wbb
