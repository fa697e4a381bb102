#include "bench.hpp"

#include "errors.hpp"
#include "parallel.hpp"
#include "sup_approx.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wbb {

namespace {

// Stream namespace for timing-only simulations, disjoint from the error
// estimation streams.
constexpr std::uint64_t kTimingStreamBase = 1ULL << 61;

struct MeanHw {
    double mean = 0.0;
    double hw = 0.0;
};

MeanHw mean_hw(std::span<const double> xs) {
    MeanHw out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) return out;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - out.mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.hw = 1.96 * sd / std::sqrt(static_cast<double>(n));
    return out;
}

void require_ascending(std::span<const std::uint64_t> sweep) {
    if (sweep.empty()) {
        throw std::invalid_argument("bench: sweep must not be empty");
    }
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (sweep[i] <= sweep[i - 1]) {
            throw std::invalid_argument("bench: sweep must be strictly ascending");
        }
    }
}

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

std::vector<std::uint64_t> default_strong_sweep(Engine engine) {
    if (engine == Engine::adaptive) {
        return {5, 11, 23, 50, 108, 232, 500, 1077, 2321};
    }
    return {5, 10, 50, 100, 500, 1000, 2000, 5000, 10000};
}

std::vector<double> default_quantile_sweep() {
    // 0.8^j from 0.64 down to just above 10^-2.
    std::vector<double> sweep;
    for (double eps = 0.64; eps > 1e-2; eps *= 0.8) sweep.push_back(eps);
    return sweep;
}

std::vector<BenchRecord> bench_strong(const BenchConfig& config,
                                      std::span<const std::uint64_t> n_sweep,
                                      int reference_multiplier) {
    require_ascending(n_sweep);
    if (reference_multiplier < 2) {
        throw std::invalid_argument("bench_strong: reference multiplier must be >= 2");
    }
    const int reps = config.replications > 0 ? config.replications : 1000;
    const std::uint64_t n_ref = static_cast<std::uint64_t>(reference_multiplier) * n_sweep.back();
    const std::size_t m = n_sweep.size();

    std::vector<double> errors(m * static_cast<std::size_t>(reps));
    std::vector<double> times(m * static_cast<std::size_t>(reps));

    if (config.engine == Engine::adaptive) {
        parallel_for(config.workers, 0, static_cast<std::uint64_t>(reps), [&](std::uint64_t r) {
            RandomStream rs(config.seed, r);
            SupOptions opt;
            opt.checkpoints = n_sweep;
            opt.record_time = true;
            const SupResult res = adaptive_sup(config.params, rs, n_ref, opt);
            for (std::size_t i = 0; i < m; ++i) {
                errors[i * reps + r] = std::fabs(res.value - res.checkpoints[i].value);
                times[i * reps + r] = res.checkpoints[i].elapsed_sec;
            }
        }, 1);
    } else {
        for (std::uint64_t n : n_sweep) {
            if (n_ref % n != 0) {
                throw std::invalid_argument(
                    "bench_strong: every sweep value must divide the reference grid size " +
                    std::to_string(n_ref));
            }
        }
        parallel_for(config.workers, 0, static_cast<std::uint64_t>(reps), [&](std::uint64_t r) {
            RandomStream rs(config.seed, r);
            const EqNestedResult res = equidistant_sup_nested(config.params, rs, n_ref, n_sweep);
            RandomStream timing_rs(config.seed, kTimingStreamBase + r);
            for (std::size_t i = 0; i < m; ++i) {
                errors[i * reps + r] = std::fabs(res.reference - res.at_grid[i]);
                const auto t0 = std::chrono::steady_clock::now();
                (void)equidistant_sup(config.params, timing_rs, n_sweep[i]);
                times[i * reps + r] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
        }, 1);
    }

    std::vector<BenchRecord> records(m);
    for (std::size_t i = 0; i < m; ++i) {
        const MeanHw err = mean_hw({errors.data() + i * reps, static_cast<std::size_t>(reps)});
        const MeanHw tim = mean_hw({times.data() + i * reps, static_cast<std::size_t>(reps)});
        records[i] = {static_cast<double>(n_sweep[i]), engine_name(config.engine),
                      config.params.eta, config.params.gamma, config.q,
                      err.mean, err.hw, tim.mean, tim.hw};
    }
    return records;
}

std::vector<BenchRecord> bench_quantile(const BenchConfig& config,
                                        std::span<const double> eps_sweep, double reference,
                                        const EqCalibration* eq_calibration) {
    if (eps_sweep.empty()) {
        throw std::invalid_argument("bench_quantile: sweep must not be empty");
    }
    if (!std::isfinite(reference)) {
        throw std::invalid_argument("bench_quantile: reference quantile must be finite");
    }
    const int reps = config.replications > 0 ? config.replications : 100;

    std::vector<BenchRecord> records;
    records.reserve(eps_sweep.size());
    for (std::size_t i = 0; i < eps_sweep.size(); ++i) {
        const double eps = eps_sweep[i];
        if (!(eps > 0.0)) {
            throw std::invalid_argument("bench_quantile: epsilon values must be positive");
        }
        std::vector<double> errors(static_cast<std::size_t>(reps));
        std::vector<double> times(static_cast<std::size_t>(reps));
        // Replications run in parallel; each pipeline call itself stays
        // single-threaded so that the per-call timing is comparable across
        // the sweep.  Timing repeats the eps-driven sampling stage until the
        // measurement dwarfs the fixed per-call overhead.
        parallel_for(config.workers, 0, static_cast<std::uint64_t>(reps), [&](std::uint64_t r) {
            QuantileRequest req{config.params, config.q, eps};
            req.seed = config.seed + static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(reps) +
                       r + 1;
            req.engine = config.engine;
            req.workers = 1;
            req.eq_calibration = eq_calibration;
            const QuantileResult res = compute_quantile(req);
            errors[r] = std::fabs(res.quantile - reference);

            auto run_stage = [&] {
                return quantile_sampling_value(config.params, config.engine, req.seed, res.n0,
                                               res.k0, config.q, 1);
            };
            auto t0 = std::chrono::steady_clock::now();
            (void)run_stage();
            double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (dt < 1e-3) {
                const int repeat = static_cast<int>(std::ceil(1e-3 / std::max(dt, 1e-7)));
                t0 = std::chrono::steady_clock::now();
                for (int j = 0; j < repeat; ++j) (void)run_stage();
                dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
                     repeat;
            }
            times[r] = dt;
        }, 1);
        const MeanHw err = mean_hw(errors);
        const MeanHw tim = mean_hw(times);
        records.push_back({eps, engine_name(config.engine), config.params.eta, config.params.gamma,
                           config.q, err.mean, err.hw, tim.mean, tim.hw});
    }
    std::sort(records.begin(), records.end(),
              [](const BenchRecord& a, const BenchRecord& b) { return a.sweep < b.sweep; });
    return records;
}

OrderEstimate estimate_order(std::span<const BenchRecord> records, bool vs_time) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : records) {
        const double x = vs_time ? r.time_sec : r.sweep;
        if (r.error > 0.0 && x > 0.0) {
            xs.push_back(std::log(x));
            ys.push_back(std::log(r.error));
        }
    }
    const std::size_t n = xs.size();
    if (n < 4) {
        throw std::invalid_argument("estimate_order: need at least 4 usable records");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("estimate_order: degenerate sweep (no spread)");
    }
    OrderEstimate out;
    out.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = my + out.slope * (xs[i] - mx);
        rss += (ys[i] - fit) * (ys[i] - fit);
    }
    out.stderr_ = (n > 2) ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    return out;
}

EqCalibrationRow fit_calibration(const WeightParams& params,
                                 std::span<const BenchRecord> records) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : records) {
        if (r.error > 0.0 && r.sweep > 0.0) {
            xs.push_back(std::log(r.sweep));
            ys.push_back(std::log(r.error));
        }
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("fit_calibration: need at least 2 usable records");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("fit_calibration: degenerate sweep");
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    return {params.eta, params.gamma, std::exp(intercept), -slope};
}

void write_csv(std::span<const BenchRecord> records, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::ios_base::failure("write_csv: cannot write '" + path + "'");
    }
    out << "sweep,engine,eta,gamma,q,error,error_hw,time_sec,time_hw\n";
    for (const auto& r : records) {
        out << format_g(r.sweep) << ',' << r.engine << ',' << format_g(r.eta) << ','
            << format_g(r.gamma) << ',' << format_g(r.q) << ',' << format_g(r.error) << ','
            << format_g(r.error_hw) << ',' << format_g(r.time_sec) << ',' << format_g(r.time_hw)
            << '\n';
    }
    if (!out) {
        throw std::ios_base::failure("write_csv: write to '" + path + "' failed");
    }
}

std::vector<BenchRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::ios_base::failure("read_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "sweep,engine,eta,gamma,q,error,error_hw,time_sec,time_hw") {
        throw std::ios_base::failure("read_csv: unexpected header in '" + path + "'");
    }
    std::vector<BenchRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        BenchRecord r;
        auto next_double = [&](double& target) {
            if (!std::getline(ss, field, ',')) {
                throw std::ios_base::failure("read_csv: truncated row in '" + path + "'");
            }
            target = std::strtod(field.c_str(), nullptr);
        };
        next_double(r.sweep);
        if (!std::getline(ss, r.engine, ',')) {
            throw std::ios_base::failure("read_csv: truncated row in '" + path + "'");
        }
        next_double(r.eta);
        next_double(r.gamma);
        next_double(r.q);
        next_double(r.error);
        next_double(r.error_hw);
        next_double(r.time_sec);
        next_double(r.time_hw);
        records.push_back(std::move(r));
    }
    return records;
}

std::string bench_csv_name(const std::string& kind, const BenchConfig& config) {
    return kind + "_" + engine_name(config.engine) + "_eta" + format_short(config.params.eta) +
           "_gamma" + format_short(config.params.gamma) + ".csv";
}

} // namespace wbb
