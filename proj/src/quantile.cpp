#include "quantile.hpp"

#include "errors.hpp"
#include "parallel.hpp"
#include "sup_approx.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace wbb {

namespace {

// Stream index namespaces.  Main quantile sampling uses streams [0, k0);
// the precompute stage and auxiliary draws live in disjoint ranges so the
// two stages are independent for any seed.
constexpr std::uint64_t kPrecomputeStreamBase = 1ULL << 62;

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t guarded_ceil(double x) {
    const double rounded = std::nearbyint(x);
    if (std::fabs(x - rounded) <= 8.0 * std::numeric_limits<double>::epsilon() * std::fabs(rounded)) {
        return static_cast<std::uint64_t>(rounded);
    }
    return static_cast<std::uint64_t>(std::ceil(x));
}

} // namespace

const char* engine_name(Engine e) {
    return e == Engine::adaptive ? "adaptive" : "equidistant";
}

Engine engine_from_name(const std::string& name) {
    if (name == "adaptive") return Engine::adaptive;
    if (name == "equidistant") return Engine::equidistant;
    throw std::invalid_argument("unknown engine '" + name + "' (expected adaptive or equidistant)");
}

const EqCalibration& EqCalibration::builtin() {
    // coeff/order for gamma in {0.25, 0.45} are least-squares fits of the
    // measured equidistant errors over n in [10^2, 10^4]; the gamma = 0 row
    // was fitted the same way from this implementation's bench output.
    static const EqCalibration table{{
        {0.0, 0.00, 0.824118, 0.574674},
        {0.0, 0.25, 1.278175, 0.564644},
        {0.0, 0.45, 2.295526, 0.459321},
    }};
    return table;
}

EqCalibration EqCalibration::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::ios_base::failure("EqCalibration: cannot open '" + path + "'");
    }
    nlohmann::json j;
    in >> j;
    EqCalibration cal;
    for (const auto& row : j.at("rows")) {
        cal.rows.push_back({row.at("eta").get<double>(), row.at("gamma").get<double>(),
                            row.at("coeff").get<double>(), row.at("order").get<double>()});
    }
    return cal;
}

void EqCalibration::save(const std::string& path) const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        j["rows"].push_back({{"eta", row.eta}, {"gamma", row.gamma},
                             {"coeff", row.coeff}, {"order", row.order}});
    }
    std::ofstream out(path);
    if (!out) {
        throw std::ios_base::failure("EqCalibration: cannot write '" + path + "'");
    }
    out << j.dump(2) << "\n";
}

std::uint64_t EqCalibration::n0_for(const WeightParams& params, double epsilon) const {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("EqCalibration: epsilon must be positive");
    }
    for (const auto& row : rows) {
        if (std::fabs(row.eta - params.eta) <= 1e-12 && std::fabs(row.gamma - params.gamma) <= 1e-12) {
            const double n = std::pow(row.coeff / epsilon, 1.0 / row.order);
            if (!(n < 1e9)) {
                throw PrecomputeDivergence("EqCalibration: calibrated n0 exceeds 1e9");
            }
            return std::max<std::uint64_t>(2, guarded_ceil(n));
        }
    }
    throw std::invalid_argument(
        "EqCalibration: no row for eta=" + std::to_string(params.eta) + ", gamma=" +
        std::to_string(params.gamma) +
        "; run `wbb bench strong --engine equidistant --emit-calibration <path>` first");
}

std::uint64_t sample_count_for(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("sample_count_for: epsilon must be a positive real");
    }
    return std::max<std::uint64_t>(1, guarded_ceil(1.0 / (epsilon * epsilon)));
}

std::uint64_t order_index_for(double q, std::uint64_t k) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("order_index_for: q must lie in (0, 1)");
    }
    const std::uint64_t idx = guarded_ceil(q * static_cast<double>(k));
    return std::min<std::uint64_t>(std::max<std::uint64_t>(idx, 1), k);
}

std::uint64_t precompute_n0(const WeightParams& params, std::uint64_t seed, double epsilon,
                            int m, int i_max, int workers) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("precompute_n0: epsilon must be positive");
    }
    if (m < 1 || i_max < 0) {
        throw std::invalid_argument("precompute_n0: need m >= 1 and i_max >= 0");
    }
    std::vector<double> deltas(static_cast<std::size_t>(m));
    for (int i = 0; i <= i_max; ++i) {
        const std::uint64_t n = 10ULL << i;
        // Fresh samples at every candidate; reusing them across i would
        // correlate the stopping rule.
        parallel_for(workers, 0, static_cast<std::uint64_t>(m), [&](std::uint64_t j) {
            RandomStream rs(seed, kPrecomputeStreamBase +
                                      static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(m) + j);
            const std::uint64_t cp[1] = {n};
            SupOptions opt;
            opt.checkpoints = cp;
            const SupResult r = adaptive_sup(params, rs, 2 * n, opt);
            deltas[j] = std::fabs(r.value - r.checkpoints.front().value);
        });
        double sum = 0.0;
        for (double d : deltas) sum += d; // fixed order, worker-count independent
        if (sum / static_cast<double>(m) <= epsilon) return n;
    }
    throw PrecomputeDivergence("precompute_n0: no n0 = 10*2^i with i <= " + std::to_string(i_max) +
                               " reached the tolerance " + std::to_string(epsilon));
}

double order_statistic(std::vector<double>& samples, std::uint64_t index) {
    if (index < 1 || index > samples.size()) {
        throw std::out_of_range("order_statistic: index out of range");
    }
    auto nth = samples.begin() + static_cast<std::ptrdiff_t>(index - 1);
    std::nth_element(samples.begin(), nth, samples.end());
    return *nth;
}

double binomial_cdf(std::uint64_t k, double p, std::int64_t j) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("binomial_cdf: p must lie in (0, 1)");
    }
    if (j < 0) return 0.0;
    if (j >= static_cast<std::int64_t>(k)) return 1.0;
    const double dk = static_cast<double>(k);
    auto log_pmf = [&](std::int64_t i) {
        const double di = static_cast<double>(i);
        return std::lgamma(dk + 1.0) - std::lgamma(di + 1.0) - std::lgamma(dk - di + 1.0) +
               di * std::log(p) + (dk - di) * std::log1p(-p);
    };
    const double mean = dk * p;
    if (static_cast<double>(j) < mean) {
        // Lower tail: sum downwards from j; terms decay geometrically.
        double term = std::exp(log_pmf(j));
        double sum = term;
        for (std::int64_t i = j; i > 0; --i) {
            term *= (static_cast<double>(i) / (dk - static_cast<double>(i) + 1.0)) * ((1.0 - p) / p);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::min(sum, 1.0);
    }
    // Upper tail: 1 - sum_{i > j} pmf(i), summed upwards from j+1.
    double term = std::exp(log_pmf(j + 1));
    double sum = term;
    for (std::int64_t i = j + 1; i < static_cast<std::int64_t>(k); ++i) {
        term *= ((dk - static_cast<double>(i)) / (static_cast<double>(i) + 1.0)) * (p / (1.0 - p));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return std::max(0.0, 1.0 - sum);
}

BinomialCiIndices binomial_ci_indices(std::uint64_t k, double q, double alpha) {
    if (k < 2) {
        throw InsufficientSamples("binomial_ci: need at least two samples");
    }
    if (!(q > 0.0 && q < 1.0) || !(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("binomial_ci: q and alpha must lie in (0, 1)");
    }
    const double half = 0.5 * alpha;
    // a - 1 = largest j with P(Z <= j) <= alpha/2 (none if already P(Z=0) is
    // above the tail budget).
    if (binomial_cdf(k, q, 0) > half) {
        throw InsufficientSamples("binomial_ci: lower tail cannot reach alpha/2 with k=" +
                                  std::to_string(k));
    }
    std::int64_t lo = 0, hi = static_cast<std::int64_t>(k); // invariant: cdf(lo) <= half < cdf(hi)
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (binomial_cdf(k, q, mid) <= half) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const std::uint64_t a = static_cast<std::uint64_t>(lo) + 1;

    // b - 1 = smallest j with P(Z <= j) >= 1 - alpha/2; b must stay <= k.
    if (1.0 - binomial_cdf(k, q, static_cast<std::int64_t>(k) - 1) > half) {
        throw InsufficientSamples("binomial_ci: upper tail cannot reach alpha/2 with k=" +
                                  std::to_string(k));
    }
    std::int64_t blo = -1, bhi = static_cast<std::int64_t>(k) - 1; // cdf(blo) < 1-half <= cdf(bhi)
    while (bhi - blo > 1) {
        const std::int64_t mid = blo + (bhi - blo) / 2;
        if (binomial_cdf(k, q, mid) >= 1.0 - half) {
            bhi = mid;
        } else {
            blo = mid;
        }
    }
    const std::uint64_t b = static_cast<std::uint64_t>(bhi) + 1;
    if (a >= b) {
        throw InsufficientSamples("binomial_ci: no index pair a < b at this level");
    }
    const double coverage =
        binomial_cdf(k, q, static_cast<std::int64_t>(b) - 1) - binomial_cdf(k, q, static_cast<std::int64_t>(a) - 1);
    return {a, b, coverage};
}

std::pair<double, double> binomial_ci(std::vector<double>& samples, double q, double alpha) {
    const BinomialCiIndices idx = binomial_ci_indices(samples.size(), q, alpha);
    const double lo = order_statistic(samples, idx.a);
    const double hi = order_statistic(samples, idx.b);
    return {lo, hi};
}

namespace {

std::vector<double> draw_samples(const WeightParams& params, Engine engine, std::uint64_t seed,
                                 std::uint64_t n0, std::uint64_t k0, int workers) {
    std::vector<double> samples(k0);
    if (engine == Engine::adaptive) {
        parallel_for(workers, 0, k0, [&](std::uint64_t r) {
            RandomStream rs(seed, r);
            samples[r] = adaptive_sup(params, rs, n0).value;
        });
    } else {
        parallel_for(workers, 0, k0, [&](std::uint64_t r) {
            RandomStream rs(seed, r);
            samples[r] = equidistant_sup(params, rs, n0);
        });
    }
    return samples;
}

} // namespace

double quantile_sampling_value(const WeightParams& params, Engine engine, std::uint64_t seed,
                               std::uint64_t n0, std::uint64_t k0, double q, int workers) {
    std::vector<double> samples = draw_samples(params, engine, seed, n0, k0, workers);
    return order_statistic(samples, order_index_for(q, k0));
}

QuantileResult compute_quantile(const QuantileRequest& req) {
    if (!(req.q > 0.0 && req.q < 1.0)) {
        throw std::invalid_argument("compute_quantile: q must lie in (0, 1)");
    }
    if (!(req.epsilon > 0.0) || !std::isfinite(req.epsilon)) {
        throw std::invalid_argument("compute_quantile: epsilon must be a positive real");
    }
    if (!(req.ci_level > 0.0 && req.ci_level < 1.0)) {
        throw std::invalid_argument("compute_quantile: ci_level must lie in (0, 1)");
    }
    const auto t0 = std::chrono::steady_clock::now();

    QuantileResult res;
    res.seed = req.seed;
    if (req.engine == Engine::adaptive) {
        res.n0 = precompute_n0(req.params, req.seed, req.epsilon, req.precompute_m, req.i_max,
                               req.workers);
    } else {
        const EqCalibration& cal = req.eq_calibration ? *req.eq_calibration : EqCalibration::builtin();
        res.n0 = cal.n0_for(req.params, req.epsilon);
    }
    res.k0 = sample_count_for(req.epsilon);

    const auto t_sampling = std::chrono::steady_clock::now();
    std::vector<double> samples =
        draw_samples(req.params, req.engine, req.seed, res.n0, res.k0, req.workers);

    res.order_index = order_index_for(req.q, res.k0);
    res.quantile = order_statistic(samples, res.order_index);
    try {
        const BinomialCiIndices ci = binomial_ci_indices(res.k0, req.q, 1.0 - req.ci_level);
        res.ci_lo = order_statistic(samples, ci.a);
        res.ci_hi = order_statistic(samples, ci.b);
        res.ci_valid = true;
    } catch (const InsufficientSamples&) {
        // Too few samples for an order-statistic interval at this level; the
        // point estimate is still well-defined.
        res.ci_lo = std::numeric_limits<double>::quiet_NaN();
        res.ci_hi = std::numeric_limits<double>::quiet_NaN();
        res.ci_valid = false;
    }
    res.sampling_sec = elapsed_since(t_sampling);
    res.elapsed_sec = elapsed_since(t0);
    return res;
}

} // namespace wbb
