#pragma once

#include "rng.hpp"
#include "score.hpp"
#include "weights.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace wbb {

// One element of the adaptive partition: subinterval [lo,hi], bridge values
// x = B(lo), y = B(hi), and the score s computed when the element was
// created.  Scores are never refreshed afterwards, even though the running
// maximum may have grown in the meantime.
struct ScoredInterval {
    double lo;
    double hi;
    double x;
    double y;
    double s;
    std::uint64_t seq; // insertion order, used to break score ties
};

// State of one adaptive refinement run: a max-priority queue of scored
// subintervals that always tile [0,1], the discrete maximum m of w|B| over
// the evaluated sites, and the step counter.  Single-owner, like the stream
// it draws from.
//
// Intervals narrower than about one ulp cannot be split at their midpoint.
// Such cells only reach the top once every score in the queue has underflown
// to exact zero (at that point no refinement can move the maximum anyway);
// they are then parked in a frozen side list, which keeps the partition
// intact, and the next splittable interval is taken instead.
class AdaptiveRun {
  public:
    AdaptiveRun(const WeightParams& params, RandomStream& rs);

    // One refinement: pop the best-scored splittable interval, evaluate the
    // bridge at its midpoint, update the maximum and push the two halves.
    void step();

    std::uint64_t steps() const { return steps_; }
    double max_value() const { return m_; }

    // All partition elements (queued and frozen), in no particular order;
    // they tile [0,1] and their count equals steps().
    std::vector<ScoredInterval> partition() const;

    // When set, every evaluation appends (site, raw bridge value).
    void set_eval_log(std::vector<std::pair<double, double>>* log) { eval_log_ = log; }

  private:
    ScoredInterval make_child(double lo, double hi, double x, double y);
    void push(ScoredInterval si);
    ScoredInterval pop_max();

    WeightParams params_;
    RandomStream* rs_;
    std::vector<ScoredInterval> heap_;
    std::vector<ScoredInterval> frozen_;
    double m_ = 0.0;
    std::uint64_t steps_ = 0;
    std::uint64_t seq_ = 0;
    std::vector<std::pair<double, double>>* eval_log_ = nullptr;
};

struct SupCheckpoint {
    std::uint64_t step;
    double value;
    double elapsed_sec; // 0 unless timing was requested
};

struct SupOptions {
    // Strictly increasing step indices in [1, n] at which to record the
    // running maximum (and, optionally, the elapsed time).
    std::span<const std::uint64_t> checkpoints{};
    std::vector<std::pair<double, double>>* eval_log = nullptr;
    bool record_time = false;
};

struct SupResult {
    double value = 0.0;
    std::vector<SupCheckpoint> checkpoints;
};

// Adaptive greedy approximation of sup w|B| with n evaluations of the score
// queue (n-1 bridge draws; step 1 evaluates nothing).
SupResult adaptive_sup(const WeightParams& params, RandomStream& rs, std::uint64_t n,
                       const SupOptions& options = {});

// Non-adaptive baseline: simulate the bridge left to right on the grid k/n,
// k = 1..n-1, and take the weighted discrete maximum.
double equidistant_sup(const WeightParams& params, RandomStream& rs, std::uint64_t n);

struct EqNestedResult {
    double reference = 0.0;              // maximum over the full fine grid
    std::vector<double> at_grid;         // maxima restricted to each coarse grid
};

// One fine-grid trajectory evaluated on the grid j/n_ref together with the
// restricted maxima over every coarse grid k/n for the requested n (each must
// divide n_ref).  Used for coupled error estimates of the equidistant scheme.
EqNestedResult equidistant_sup_nested(const WeightParams& params, RandomStream& rs,
                                      std::uint64_t n_ref,
                                      std::span<const std::uint64_t> grid_sizes);

} // namespace wbb
