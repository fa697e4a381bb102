#include "sup_approx.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <vector>

using namespace wbb;

namespace {

std::vector<ScoredInterval> sorted_partition(const AdaptiveRun& run) {
    std::vector<ScoredInterval> parts = run.partition();
    std::sort(parts.begin(), parts.end(),
              [](const ScoredInterval& a, const ScoredInterval& b) { return a.lo < b.lo; });
    return parts;
}

double run_once_timed(const WeightParams& params, std::uint64_t seed, std::uint64_t n) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        RandomStream rs(seed, static_cast<std::uint64_t>(rep));
        const auto t0 = std::chrono::steady_clock::now();
        (void)adaptive_sup(params, rs, n);
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, dt);
    }
    return best;
}

} // namespace

TEST_CASE("adaptive_sup trivial cases") {
    const WeightParams p(0.0, 0.0);
    RandomStream rs(1, 0);
    CHECK(adaptive_sup(p, rs, 1).value == 0.0);
    CHECK(rs.normal_draws() == 0);

    // With n = 2 the single midpoint evaluation at c = 1/2 decides the value:
    // m_2 = w(1/2)|z| = |z| for the constant weight.
    RandomStream rs_run(17, 0), rs_ref(17, 0);
    const double value = adaptive_sup(p, rs_run, 2).value;
    const double z = bridge_midpoint(rs_ref, Interval(0.0, 1.0), 0.0, 0.0);
    CHECK(value == std::fabs(z));
    CHECK(rs_run.normal_draws() == 1);
}

TEST_CASE("adaptive_sup consumes exactly n-1 draws") {
    const WeightParams p(0.0, 0.45);
    for (std::uint64_t n : {1ULL, 2ULL, 17ULL, 300ULL}) {
        RandomStream rs(3, n);
        (void)adaptive_sup(p, rs, n);
        CHECK(rs.normal_draws() == n - 1);
    }
}

TEST_CASE("partition invariant: queue tiles [0,1] with shared endpoint values") {
    const WeightParams p(0.1, 0.3);
    RandomStream rs(5, 0);
    AdaptiveRun run(p, rs);
    for (int k = 0; k < 400; ++k) {
        run.step();
        if (k % 40 != 0) continue;
        const auto parts = sorted_partition(run);
        CHECK(parts.size() == run.steps());
        CHECK(parts.front().lo == 0.0);
        CHECK(parts.back().hi == 1.0);
        for (std::size_t i = 1; i < parts.size(); ++i) {
            CHECK(parts[i].lo == parts[i - 1].hi); // exact tiling
            CHECK(parts[i].x == parts[i - 1].y);   // shared boundary values
        }
        CHECK(parts.front().x == 0.0);
        CHECK(parts.back().y == 0.0);
    }
}

TEST_CASE("running maximum equals the evaluation-log maximum, and is monotone") {
    const WeightParams p(0.05, 0.45);
    RandomStream rs(101, 0);
    std::vector<std::pair<double, double>> log;
    std::vector<std::uint64_t> cps(512);
    std::iota(cps.begin(), cps.end(), 1);
    SupOptions opt;
    opt.checkpoints = cps;
    opt.eval_log = &log;
    const SupResult res = adaptive_sup(p, rs, 512, opt);

    CHECK(log.size() == 511);
    double recomputed = 0.0;
    for (const auto& [site, value] : log) {
        recomputed = std::max(recomputed, weight(p, site) * std::fabs(value));
    }
    CHECK(recomputed == res.value); // exact: same operations, same order

    double prev = 0.0;
    for (const auto& cp : res.checkpoints) {
        CHECK(cp.value >= prev);
        prev = cp.value;
    }
    CHECK(res.checkpoints.back().value == res.value);
}

TEST_CASE("checkpointing yields the coupled doubling gap from one trajectory") {
    const WeightParams p(0.0, 0.25);
    const std::uint64_t n = 64;
    RandomStream rs(7, 0);
    const std::uint64_t cp[1] = {n};
    SupOptions opt;
    opt.checkpoints = cp;
    const SupResult res = adaptive_sup(p, rs, 2 * n, opt);
    REQUIRE(res.checkpoints.size() == 1);
    CHECK(res.checkpoints.front().value <= res.value);

    // The checkpoint value is exactly what an n-step run would return.
    RandomStream rs2(7, 0);
    CHECK(adaptive_sup(p, rs2, n).value == res.checkpoints.front().value);
}

TEST_CASE("adaptive_sup is deterministic for a fixed stream") {
    const WeightParams p(0.0, 0.45);
    RandomStream a(99, 3), b(99, 3);
    const double va = adaptive_sup(p, a, 777).value;
    const double vb = adaptive_sup(p, b, 777).value;
    CHECK(va == vb);
}

TEST_CASE("doubling gaps collapse super-polynomially at gamma = 0.45") {
    const WeightParams p(0.0, 0.45);
    const int reps = 1000;
    const std::vector<std::uint64_t> cps{128, 256, 512, 1024};
    double sum128 = 0.0, sum256 = 0.0, sum512 = 0.0;
    for (int r = 0; r < reps; ++r) {
        RandomStream rs(31337, static_cast<std::uint64_t>(r));
        SupOptions opt;
        opt.checkpoints = cps;
        const SupResult res = adaptive_sup(p, rs, 1024, opt);
        sum128 += res.checkpoints[1].value - res.checkpoints[0].value;
        sum256 += res.checkpoints[2].value - res.checkpoints[1].value;
        sum512 += res.value - res.checkpoints[2].value;
    }
    const double d128 = sum128 / reps;
    const double d256 = sum256 / reps;
    const double d512 = sum512 / reps;
    // Super-polynomial decay: the per-doubling shrink factor itself grows
    // (measured here: ~8.5 from 128 to 256, then >100 from 256 to 512), and
    // averages far above an order of magnitude per doubling.
    CHECK(d512 < d128 / 100.0);
    CHECK(d256 / d512 > d128 / d256);
    CHECK(d128 / d256 > 4.0);
}

TEST_CASE("equidistant_sup basics") {
    const WeightParams p(0.0, 0.0);
    // n = 2: single grid point 1/2, the value is |B(1/2)| by reflection.
    RandomStream rs_run(23, 0), rs_ref(23, 0);
    const double value = equidistant_sup(p, rs_run, 2);
    const double draw = bridge_forward(rs_ref, 0.0, 0.5, 0.0);
    CHECK(value == std::fabs(draw));
    CHECK(rs_run.normal_draws() == 1);

    RandomStream rs(24, 0);
    (void)equidistant_sup(p, rs, 1000);
    CHECK(rs.normal_draws() == 999);
    CHECK_THROWS_AS(equidistant_sup(p, rs, 1), std::invalid_argument);
}

TEST_CASE("equidistant_sup: dead-zone grid points contribute nothing") {
    // eta = 0.4, n = 5: every grid point k/5 falls outside ]0.4, 0.6[.
    const WeightParams p(0.4, 0.25);
    RandomStream rs(77, 0);
    CHECK(equidistant_sup(p, rs, 5) == 0.0);
    CHECK(rs.normal_draws() == 4); // the path is still simulated
}

TEST_CASE("nested equidistant restriction matches a manual pass") {
    const WeightParams p(0.0, 0.25);
    const std::uint64_t n_ref = 64;
    const std::vector<std::uint64_t> grids{4, 8, 16, 64};
    RandomStream rs(123, 9);
    const EqNestedResult nested = equidistant_sup_nested(p, rs, n_ref, grids);

    // Replay the identical stream and restrict by hand.
    RandomStream rs2(123, 9);
    std::vector<double> path(n_ref); // path[j] = B(j/64), j >= 1
    double x = 0.0, s = 0.0;
    for (std::uint64_t j = 1; j < n_ref; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(n_ref);
        x = bridge_forward(rs2, s, t, x);
        s = t;
        path[j] = x;
    }
    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
        double expected = 0.0;
        const std::uint64_t stride = n_ref / grids[gi];
        for (std::uint64_t j = stride; j < n_ref; j += stride) {
            const double t = static_cast<double>(j) / static_cast<double>(n_ref);
            expected = std::max(expected, weight(p, t) * std::fabs(path[j]));
        }
        CHECK(nested.at_grid[gi] == expected);
        CHECK(nested.at_grid[gi] <= nested.reference);
    }
    CHECK(nested.at_grid.back() == nested.reference); // full grid = reference

    CHECK_THROWS_AS(equidistant_sup_nested(p, rs, 64, std::vector<std::uint64_t>{7}),
                    std::invalid_argument);
}

TEST_CASE("adaptive cost grows like n log n") {
    const WeightParams p(0.0, 0.25);
    const double t3 = run_once_timed(p, 555, 1000);
    const double t4 = run_once_timed(p, 555, 10000);
    const double t5 = run_once_timed(p, 555, 100000);
    auto nlogn = [](double n) { return n * std::log(n); };
    const double c = t4 / nlogn(10000.0);
    CHECK(t3 < 2.0 * c * nlogn(1000.0));
    CHECK(t3 > 0.5 * c * nlogn(1000.0));
    CHECK(t5 < 2.0 * c * nlogn(100000.0));
    CHECK(t5 > 0.5 * c * nlogn(100000.0));
}
