#include "wbb.h"

#include "bench.hpp"
#include "cusum.hpp"
#include "errors.hpp"
#include "kolmogorov.hpp"
#include "normal.hpp"
#include "quantile.hpp"
#include "rng.hpp"
#include "sup_approx.hpp"
#include "weights.hpp"

#include <cstring>
#include <filesystem>
#include <limits>
#include <new>
#include <string>

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* message) {
    g_last_error = message;
    return code;
}

// Maps the core exception taxonomy onto status codes.
template <typename F>
int guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return WBB_OK;
    } catch (const wbb::PrecomputeDivergence& e) {
        return fail(WBB_ERR_DIVERGENCE, e.what());
    } catch (const wbb::DataError& e) {
        return fail(WBB_ERR_DATA, e.what());
    } catch (const wbb::InsufficientSamples& e) {
        return fail(WBB_ERR_INSUFFICIENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(WBB_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(WBB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(WBB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(WBB_ERR_IO, e.what());
    } catch (const std::ios_base::failure& e) {
        return fail(WBB_ERR_IO, e.what());
    } catch (const std::bad_alloc& e) {
        return fail(WBB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(WBB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(WBB_ERR_INTERNAL, "unknown error");
    }
}

wbb::Engine to_engine(int engine) {
    switch (engine) {
        case WBB_ENGINE_ADAPTIVE: return wbb::Engine::adaptive;
        case WBB_ENGINE_EQUIDISTANT: return wbb::Engine::equidistant;
    }
    throw std::invalid_argument("unknown engine code " + std::to_string(engine));
}

wbb::DarlingErdosVariant to_variant(int variant) {
    switch (variant) {
        case WBB_DE_AS_STATED: return wbb::DarlingErdosVariant::as_stated;
        case WBB_DE_ONE_SIDED: return wbb::DarlingErdosVariant::one_sided;
    }
    throw std::invalid_argument("unknown Darling-Erdos variant code " + std::to_string(variant));
}

wbb::CriticalSource to_source(int source) {
    switch (source) {
        case WBB_CRITICAL_MONTE_CARLO: return wbb::CriticalSource::monte_carlo;
        case WBB_CRITICAL_KOLMOGOROV: return wbb::CriticalSource::kolmogorov;
        case WBB_CRITICAL_DARLING_ERDOS: return wbb::CriticalSource::darling_erdos;
    }
    throw std::invalid_argument("unknown critical source code " + std::to_string(source));
}

void require_out(const void* p) {
    if (p == nullptr) throw std::invalid_argument("output pointer must not be null");
}

void run_bench_common(const std::vector<wbb::BenchRecord>& records, const char* out_dir,
                      const std::string& file_name, wbb_bench_result* out) {
    namespace fs = std::filesystem;
    if (out_dir == nullptr || *out_dir == '\0') {
        throw std::invalid_argument("output directory must not be empty");
    }
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / file_name).string();
    wbb::write_csv(records, path);

    // Slopes need at least 4 usable records; short sweeps still produce the
    // CSV and report NaN here.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out->slope_vs_sweep = out->slope_vs_sweep_se = nan;
    out->slope_vs_time = out->slope_vs_time_se = nan;
    try {
        const wbb::OrderEstimate vs_sweep = wbb::estimate_order(records, false);
        out->slope_vs_sweep = vs_sweep.slope;
        out->slope_vs_sweep_se = vs_sweep.stderr_;
    } catch (const std::invalid_argument&) {
    }
    try {
        const wbb::OrderEstimate vs_time = wbb::estimate_order(records, true);
        out->slope_vs_time = vs_time.slope;
        out->slope_vs_time_se = vs_time.stderr_;
    } catch (const std::invalid_argument&) {
    }
    if (path.size() + 1 > sizeof out->csv_path) {
        throw std::invalid_argument("output path too long");
    }
    std::memcpy(out->csv_path, path.c_str(), path.size() + 1);
}

} // namespace

struct wbb_series {
    wbb::SeriesSample sample;
};

extern "C" {

const char* wbb_version(void) { return "1.0.0"; }

const char* wbb_last_error(void) { return g_last_error.c_str(); }

int wbb_std_normal_cdf(double x, double* out) {
    return guarded([&] {
        require_out(out);
        *out = wbb::std_normal_cdf(x);
    });
}

int wbb_kolmogorov_cdf(double x, double* out) {
    return guarded([&] {
        require_out(out);
        *out = wbb::kolmogorov_cdf(x);
    });
}

int wbb_kolmogorov_quantile(double q, double* out) {
    return guarded([&] {
        require_out(out);
        *out = wbb::kolmogorov_quantile(q);
    });
}

int wbb_darling_erdos_critical(int64_t n, double alpha, double sigma, int variant, double* out) {
    return guarded([&] {
        require_out(out);
        *out = wbb::darling_erdos_critical(n, alpha, sigma, to_variant(variant));
    });
}

int wbb_sup_approx(double eta, double gamma, int engine, uint64_t seed, uint64_t stream,
                   uint64_t n, double* out) {
    return guarded([&] {
        require_out(out);
        const wbb::WeightParams params(eta, gamma);
        wbb::RandomStream rs(seed, stream);
        if (to_engine(engine) == wbb::Engine::adaptive) {
            *out = wbb::adaptive_sup(params, rs, n).value;
        } else {
            *out = wbb::equidistant_sup(params, rs, n);
        }
    });
}

void wbb_quantile_request_init(wbb_quantile_request* req) {
    if (req == nullptr) return;
    *req = wbb_quantile_request{};
    req->eta = 0.0;
    req->gamma = 0.0;
    req->q = 0.95;
    req->epsilon = 1e-2;
    req->ci_level = 0.95;
    req->seed = 0;
    req->engine = WBB_ENGINE_ADAPTIVE;
    req->workers = 0;
    req->precompute_m = 1000;
    req->i_max = 20;
    req->eq_calibration_path = nullptr;
}

int wbb_compute_quantile(const wbb_quantile_request* req, wbb_quantile_result* out) {
    return guarded([&] {
        require_out(out);
        if (req == nullptr) throw std::invalid_argument("request must not be null");
        wbb::EqCalibration calibration;
        wbb::QuantileRequest core{wbb::WeightParams(req->eta, req->gamma), req->q, req->epsilon};
        core.seed = req->seed;
        core.engine = to_engine(req->engine);
        core.ci_level = req->ci_level;
        core.workers = req->workers;
        core.precompute_m = req->precompute_m;
        core.i_max = req->i_max;
        if (req->eq_calibration_path != nullptr) {
            calibration = wbb::EqCalibration::load(req->eq_calibration_path);
            core.eq_calibration = &calibration;
        }
        const wbb::QuantileResult res = wbb::compute_quantile(core);
        out->quantile = res.quantile;
        out->n0 = res.n0;
        out->k0 = res.k0;
        out->ci_valid = res.ci_valid ? 1 : 0;
        out->ci_lo = res.ci_lo;
        out->ci_hi = res.ci_hi;
        out->order_index = res.order_index;
        out->elapsed_sec = res.elapsed_sec;
        out->sampling_sec = res.sampling_sec;
        out->seed = res.seed;
    });
}

int wbb_series_read(const char* path, const char* column, wbb_series** out) {
    return guarded([&] {
        require_out(out);
        if (path == nullptr) throw std::invalid_argument("path must not be null");
        auto xs = wbb::read_series(path, column ? column : "");
        if (xs.size() < 2) {
            throw wbb::DataError("series needs at least 2 observations");
        }
        auto* handle = new wbb_series;
        handle->sample.xs = std::move(xs);
        *out = handle;
    });
}

int wbb_series_from_array(const double* xs, size_t n, wbb_series** out) {
    return guarded([&] {
        require_out(out);
        if (xs == nullptr || n < 2) {
            throw std::invalid_argument("need a non-null array of at least 2 observations");
        }
        auto* handle = new wbb_series;
        handle->sample.xs.assign(xs, xs + n);
        *out = handle;
    });
}

void wbb_series_free(wbb_series* series) { delete series; }

int wbb_series_size(const wbb_series* series, size_t* out) {
    return guarded([&] {
        require_out(out);
        if (series == nullptr) throw std::invalid_argument("series must not be null");
        *out = series->sample.xs.size();
    });
}

void wbb_test_options_init(wbb_test_options* opt) {
    if (opt == nullptr) return;
    *opt = wbb_test_options{};
    opt->eta = 0.0;
    opt->gamma = 0.0;
    opt->alpha = 0.05;
    opt->sigma = 1.0;
    opt->critical_source = WBB_CRITICAL_MONTE_CARLO;
    opt->epsilon = 1e-2;
    opt->seed = 0;
    opt->workers = 0;
    opt->de_variant = WBB_DE_AS_STATED;
}

int wbb_run_test(const wbb_series* series, const wbb_test_options* opt, wbb_test_result* out) {
    return guarded([&] {
        require_out(out);
        if (series == nullptr || opt == nullptr) {
            throw std::invalid_argument("series and options must not be null");
        }
        wbb::SeriesSample sample;
        if (opt->sigma > 0.0) {
            sample = wbb::make_series(series->sample.xs, opt->sigma);
        } else {
            sample = wbb::make_series_estimated(series->sample.xs);
        }
        wbb::CusumTestConfig config;
        config.eta = opt->eta;
        config.gamma = opt->gamma;
        config.alpha = opt->alpha;
        config.source = to_source(opt->critical_source);
        config.epsilon = opt->epsilon;
        config.seed = opt->seed;
        config.workers = opt->workers;
        config.variant = to_variant(opt->de_variant);
        const wbb::TestOutcome res = wbb::run_test(sample, config);
        out->statistic = res.statistic;
        out->critical_value = res.critical_value;
        out->reject = res.reject ? 1 : 0;
        out->argmax_k = res.argmax_k;
        out->sigma = res.sigma;
        out->sigma_estimated = res.sigma_estimated ? 1 : 0;
    });
}

int wbb_cusum_values(const wbb_series* series, double eta, double gamma, double* values) {
    return guarded([&] {
        if (series == nullptr || values == nullptr) {
            throw std::invalid_argument("series and values must not be null");
        }
        const auto out = wbb::cusum_weighted_values(series->sample.xs, eta, gamma);
        for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i];
    });
}

int wbb_threshold_curve(double gamma, double c, int points, double* ts, double* fs) {
    return guarded([&] {
        if (ts == nullptr || fs == nullptr) {
            throw std::invalid_argument("output arrays must not be null");
        }
        const auto curve = wbb::threshold_curve(gamma, c, points);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            ts[i] = curve[i].first;
            fs[i] = curve[i].second;
        }
    });
}

int wbb_bench_strong(double eta, double gamma, int engine, const uint64_t* n_sweep,
                     size_t n_count, int replications, int reference_multiplier, uint64_t seed,
                     int workers, const char* out_dir, const char* emit_calibration,
                     wbb_bench_result* out) {
    return guarded([&] {
        require_out(out);
        wbb::BenchConfig config{wbb::WeightParams(eta, gamma)};
        config.engine = to_engine(engine);
        config.replications = replications;
        config.seed = seed;
        config.workers = workers;
        std::vector<std::uint64_t> sweep;
        if (n_sweep == nullptr || n_count == 0) {
            sweep = wbb::default_strong_sweep(config.engine);
        } else {
            sweep.assign(n_sweep, n_sweep + n_count);
        }
        const auto records = wbb::bench_strong(config, sweep,
                                               reference_multiplier > 0 ? reference_multiplier : 10);
        run_bench_common(records, out_dir, wbb::bench_csv_name("strong", config), out);
        if (emit_calibration != nullptr && *emit_calibration != '\0') {
            if (config.engine != wbb::Engine::equidistant) {
                throw std::invalid_argument(
                    "calibration fits apply to the equidistant engine only");
            }
            wbb::EqCalibration calibration = wbb::EqCalibration::builtin();
            const wbb::EqCalibrationRow row = wbb::fit_calibration(config.params, records);
            bool replaced = false;
            for (auto& existing : calibration.rows) {
                if (existing.eta == row.eta && existing.gamma == row.gamma) {
                    existing = row;
                    replaced = true;
                }
            }
            if (!replaced) calibration.rows.push_back(row);
            calibration.save(emit_calibration);
        }
    });
}

int wbb_bench_quantile(double eta, double gamma, double q, int engine, const double* eps_sweep,
                       size_t eps_count, int replications, double reference, uint64_t seed,
                       int workers, const char* out_dir, const char* eq_calibration_path,
                       wbb_bench_result* out) {
    return guarded([&] {
        require_out(out);
        wbb::BenchConfig config{wbb::WeightParams(eta, gamma)};
        config.engine = to_engine(engine);
        config.q = q;
        config.replications = replications;
        config.seed = seed;
        config.workers = workers;
        std::vector<double> sweep;
        if (eps_sweep == nullptr || eps_count == 0) {
            sweep = wbb::default_quantile_sweep();
        } else {
            sweep.assign(eps_sweep, eps_sweep + eps_count);
        }
        wbb::EqCalibration calibration;
        const wbb::EqCalibration* calibration_ptr = nullptr;
        if (eq_calibration_path != nullptr && *eq_calibration_path != '\0') {
            calibration = wbb::EqCalibration::load(eq_calibration_path);
            calibration_ptr = &calibration;
        }
        const auto records = wbb::bench_quantile(config, sweep, reference, calibration_ptr);
        run_bench_common(records, out_dir, wbb::bench_csv_name("quantile", config), out);
    });
}

} // extern "C"
