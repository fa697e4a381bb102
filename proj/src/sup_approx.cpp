#include "sup_approx.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace wbb {

namespace {

// Below this width the conditional variance underflows any useful range;
// children are kept (the partition must still tile [0,1]) but scored zero so
// refinement moves elsewhere.
constexpr double kMinSplitWidth = 0x1.0p-52;

inline bool higher_priority(const ScoredInterval& a, const ScoredInterval& b) {
    if (a.s != b.s) return a.s > b.s;
    return a.seq < b.seq;
}

} // namespace

AdaptiveRun::AdaptiveRun(const WeightParams& params, RandomStream& rs)
    : params_(params), rs_(&rs) {
    ScoredInterval root{0.0, 1.0, 0.0, 0.0, 0.0, seq_++};
    root.s = score(params_, ScoreInputs{Interval(0.0, 1.0), 0.0, 0.0, 0.0});
    heap_.push_back(root);
    steps_ = 1;
}

ScoredInterval AdaptiveRun::make_child(double lo, double hi, double x, double y) {
    ScoredInterval child{lo, hi, x, y, 0.0, seq_++};
    if (hi - lo > kMinSplitWidth) {
        child.s = score(params_, ScoreInputs{Interval(lo, hi), x, y, m_});
    }
    return child;
}

void AdaptiveRun::push(ScoredInterval si) {
    heap_.push_back(si);
    std::size_t i = heap_.size() - 1;
    while (i > 0) {
        const std::size_t parent = (i - 1) / 2;
        if (!higher_priority(heap_[i], heap_[parent])) break;
        std::swap(heap_[i], heap_[parent]);
        i = parent;
    }
}

ScoredInterval AdaptiveRun::pop_max() {
    ScoredInterval top = heap_.front();
    heap_.front() = heap_.back();
    heap_.pop_back();
    std::size_t i = 0;
    const std::size_t n = heap_.size();
    while (true) {
        const std::size_t l = 2 * i + 1;
        const std::size_t r = l + 1;
        std::size_t best = i;
        if (l < n && higher_priority(heap_[l], heap_[best])) best = l;
        if (r < n && higher_priority(heap_[r], heap_[best])) best = r;
        if (best == i) break;
        std::swap(heap_[i], heap_[best]);
        i = best;
    }
    return top;
}

std::vector<ScoredInterval> AdaptiveRun::partition() const {
    std::vector<ScoredInterval> all = heap_;
    all.insert(all.end(), frozen_.begin(), frozen_.end());
    return all;
}

void AdaptiveRun::step() {
    ScoredInterval top = pop_max();
    double c = 0.5 * (top.lo + top.hi);
    while (!(c > top.lo && c < top.hi)) {
        frozen_.push_back(top);
        if (heap_.empty()) {
            throw std::runtime_error("AdaptiveRun: refinement exhausted double precision");
        }
        top = pop_max();
        c = 0.5 * (top.lo + top.hi);
    }
    const double z = bridge_midpoint(*rs_, Interval(top.lo, top.hi), top.x, top.y);
    const double wz = weight(params_, c) * std::fabs(z);
    if (wz > m_) m_ = wz;
    if (eval_log_) eval_log_->emplace_back(c, z);
    push(make_child(top.lo, c, top.x, z));
    push(make_child(c, top.hi, z, top.y));
    ++steps_;
}

SupResult adaptive_sup(const WeightParams& params, RandomStream& rs, std::uint64_t n,
                       const SupOptions& options) {
    if (n < 1) {
        throw std::invalid_argument("adaptive_sup: n must be >= 1");
    }
    for (std::size_t i = 0; i < options.checkpoints.size(); ++i) {
        if (options.checkpoints[i] < 1 || options.checkpoints[i] > n ||
            (i > 0 && options.checkpoints[i] <= options.checkpoints[i - 1])) {
            throw std::invalid_argument(
                "adaptive_sup: checkpoints must be strictly increasing within [1, n]");
        }
    }
    const auto t0 = std::chrono::steady_clock::now();
    AdaptiveRun run(params, rs);
    if (options.eval_log) run.set_eval_log(options.eval_log);

    SupResult out;
    out.checkpoints.reserve(options.checkpoints.size());
    std::size_t ci = 0;
    auto note = [&] {
        if (ci < options.checkpoints.size() && options.checkpoints[ci] == run.steps()) {
            double elapsed = 0.0;
            if (options.record_time) {
                elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
            out.checkpoints.push_back({run.steps(), run.max_value(), elapsed});
            ++ci;
        }
    };
    note();
    while (run.steps() < n) {
        run.step();
        note();
    }
    out.value = run.max_value();
    return out;
}

double equidistant_sup(const WeightParams& params, RandomStream& rs, std::uint64_t n) {
    if (n < 2) {
        throw std::invalid_argument("equidistant_sup: n must be >= 2");
    }
    double m = 0.0;
    double x = 0.0;
    double s = 0.0;
    for (std::uint64_t k = 1; k < n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n);
        x = bridge_forward(rs, s, t, x);
        s = t;
        const double wt = weight(params, t);
        if (wt == 0.0) continue;
        const double v = wt * std::fabs(x);
        if (v > m) m = v;
    }
    return m;
}

EqNestedResult equidistant_sup_nested(const WeightParams& params, RandomStream& rs,
                                      std::uint64_t n_ref,
                                      std::span<const std::uint64_t> grid_sizes) {
    if (n_ref < 2) {
        throw std::invalid_argument("equidistant_sup_nested: n_ref must be >= 2");
    }
    std::vector<std::uint64_t> stride(grid_sizes.size());
    for (std::size_t i = 0; i < grid_sizes.size(); ++i) {
        if (grid_sizes[i] < 2 || n_ref % grid_sizes[i] != 0) {
            throw std::invalid_argument(
                "equidistant_sup_nested: every grid size must be >= 2 and divide n_ref");
        }
        stride[i] = n_ref / grid_sizes[i];
    }
    EqNestedResult out;
    out.at_grid.assign(grid_sizes.size(), 0.0);
    double x = 0.0;
    double s = 0.0;
    for (std::uint64_t j = 1; j < n_ref; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(n_ref);
        x = bridge_forward(rs, s, t, x);
        s = t;
        const double wt = weight(params, t);
        if (wt == 0.0) continue;
        const double v = wt * std::fabs(x);
        if (v > out.reference) out.reference = v;
        for (std::size_t i = 0; i < stride.size(); ++i) {
            if (j % stride[i] == 0 && v > out.at_grid[i]) out.at_grid[i] = v;
        }
    }
    return out;
}

} // namespace wbb
