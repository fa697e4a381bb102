#include "cusum.hpp"

#include "errors.hpp"
#include "quantile.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wbb {

namespace {

double parse_number(const std::string& text, const std::string& where) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    // Reject empty fields, trailing junk and non-finite values: silently
    // skipping rows would corrupt the test.
    while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (end == begin || (end && *end != '\0') || !std::isfinite(value)) {
        throw DataError("non-numeric observation in " + where + ": '" + text + "'");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct WeightedMax {
    double value = 0.0;
    std::uint64_t argmax = 0;
};

// Weighted maximum of the centered partial sums, with the strict index
// window eta*n < k < (1-eta)*n.  Raw eta/gamma so the gamma = 1/2 route of
// the Darling-Erdos test works too.
WeightedMax weighted_cusum_max(std::span<const double> xs, double eta, double gamma,
                               std::vector<double>* values) {
    const std::uint64_t n = xs.size();
    const double dn = static_cast<double>(n);
    double total = 0.0;
    for (double v : xs) total += v;
    const double root_n = std::sqrt(dn);

    WeightedMax best;
    double running = 0.0;
    for (std::uint64_t k = 1; k < n; ++k) {
        running += xs[k - 1];
        const double dk = static_cast<double>(k);
        double value = 0.0;
        if (dk > eta * dn && dk < (1.0 - eta) * dn) {
            const double t = dk / dn;
            const double partial = running - t * total;
            const double w = (gamma == 0.0) ? 1.0 : std::pow(t * (1.0 - t), -gamma);
            value = w * std::fabs(partial) / root_n;
        }
        if (values) values->push_back(value);
        if (value > best.value) {
            best.value = value;
            best.argmax = k;
        }
    }
    return best;
}

} // namespace

std::vector<double> read_series(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open data file '" + path + "'");
    }
    std::vector<double> xs;
    std::string line;
    if (column.empty()) {
        std::uint64_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = strip(line);
            if (t.empty()) continue;
            xs.push_back(parse_number(t, path + ":" + std::to_string(lineno)));
        }
        return xs;
    }
    if (!std::getline(in, line)) {
        throw DataError("empty CSV file '" + path + "'");
    }
    const auto header = split_csv_line(line);
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (strip(header[i]) == column) {
            if (col != header.size()) {
                throw DataError("duplicated column '" + column + "' in '" + path + "'");
            }
            col = i;
        }
    }
    if (col == header.size()) {
        throw DataError("column '" + column + "' not found in '" + path + "'");
    }
    std::uint64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (col >= fields.size()) {
            throw DataError("row " + std::to_string(lineno) + " of '" + path +
                            "' has no field for column '" + column + "'");
        }
        xs.push_back(parse_number(strip(fields[col]), path + ":" + std::to_string(lineno)));
    }
    return xs;
}

double estimate_sigma(std::span<const double> xs) {
    if (xs.size() < 3) {
        throw DataError("estimate_sigma: need at least 3 observations");
    }
    const std::size_t m = xs.size() - 1;
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += xs[i + 1] - xs[i];
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = (xs[i + 1] - xs[i]) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(m - 1)) / std::sqrt(2.0);
}

SeriesSample make_series(std::vector<double> xs, double sigma) {
    if (xs.size() < 2) {
        throw DataError("series needs at least 2 observations");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DataError("sigma must be a positive real");
    }
    return SeriesSample{std::move(xs), sigma, false};
}

SeriesSample make_series_estimated(std::vector<double> xs) {
    if (xs.size() < 3) {
        throw DataError("series needs at least 3 observations to estimate sigma");
    }
    const double sigma = estimate_sigma(xs);
    if (!(sigma > 0.0)) {
        throw DataError("sigma estimate degenerated to zero (constant series?)");
    }
    return SeriesSample{std::move(xs), sigma, true};
}

double cusum_partial(std::span<const double> xs, std::uint64_t k) {
    const std::uint64_t n = xs.size();
    if (k < 1 || k >= n) {
        throw std::out_of_range("cusum_partial: need 1 <= k < n");
    }
    double total = 0.0;
    double prefix = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        total += xs[i];
        if (i < k) prefix += xs[i];
    }
    return prefix - (static_cast<double>(k) / static_cast<double>(n)) * total;
}

double cusum_statistic(std::span<const double> xs, const WeightParams& params) {
    if (xs.size() < 2) {
        throw std::invalid_argument("cusum_statistic: need n >= 2");
    }
    return weighted_cusum_max(xs, params.eta, params.gamma, nullptr).value;
}

std::vector<double> cusum_weighted_values(std::span<const double> xs, double eta, double gamma) {
    if (xs.size() < 2) {
        throw std::invalid_argument("cusum_weighted_values: need n >= 2");
    }
    if (!(eta >= 0.0 && eta < 0.5) || !(gamma >= 0.0 && gamma <= 0.5)) {
        throw std::invalid_argument(
            "cusum_weighted_values: eta must lie in [0, 1/2) and gamma in [0, 1/2]");
    }
    std::vector<double> values;
    values.reserve(xs.size() - 1);
    weighted_cusum_max(xs, eta, gamma, &values);
    return values;
}

const char* critical_source_name(CriticalSource s) {
    switch (s) {
        case CriticalSource::monte_carlo: return "monte-carlo";
        case CriticalSource::kolmogorov: return "kolmogorov";
        case CriticalSource::darling_erdos: return "darling-erdos";
    }
    return "?";
}

CriticalSource critical_source_from_name(const std::string& name) {
    if (name == "monte-carlo") return CriticalSource::monte_carlo;
    if (name == "kolmogorov") return CriticalSource::kolmogorov;
    if (name == "darling-erdos") return CriticalSource::darling_erdos;
    throw std::invalid_argument("unknown critical source '" + name +
                                "' (expected monte-carlo, kolmogorov or darling-erdos)");
}

TestOutcome run_test(const SeriesSample& series, const CusumTestConfig& config) {
    const std::uint64_t n = series.xs.size();
    if (n < 2) {
        throw std::invalid_argument("run_test: need n >= 2");
    }
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw std::invalid_argument("run_test: alpha must lie in (0, 1)");
    }
    if (!(config.eta >= 0.0 && config.eta < 0.5)) {
        throw std::invalid_argument("run_test: eta must lie in [0, 1/2)");
    }
    if (!(config.gamma >= 0.0 && config.gamma <= 0.5)) {
        throw std::invalid_argument("run_test: gamma must lie in [0, 1/2]");
    }

    double critical = 0.0;
    switch (config.source) {
        case CriticalSource::kolmogorov:
            if (config.gamma != 0.0 || config.eta != 0.0) {
                throw std::invalid_argument(
                    "run_test: critical source 'kolmogorov' requires eta = 0 and gamma = 0");
            }
            critical = series.sigma * kolmogorov_quantile(1.0 - config.alpha);
            break;
        case CriticalSource::darling_erdos:
            if (config.gamma != 0.5) {
                throw std::invalid_argument(
                    "run_test: critical source 'darling-erdos' requires gamma = 1/2");
            }
            critical = darling_erdos_critical(static_cast<std::int64_t>(n), config.alpha,
                                              series.sigma, config.variant);
            break;
        case CriticalSource::monte_carlo: {
            // WeightParams validates the ranges and rejects (0, 1/2).
            QuantileRequest req{WeightParams(config.eta, config.gamma), 1.0 - config.alpha,
                                config.epsilon};
            req.seed = config.seed;
            req.workers = config.workers;
            critical = series.sigma * compute_quantile(req).quantile;
            break;
        }
    }

    TestOutcome out;
    out.sigma = series.sigma;
    out.sigma_estimated = series.sigma_estimated;
    out.critical_value = critical;
    std::vector<double> values;
    const WeightedMax best =
        weighted_cusum_max(series.xs, config.eta, config.gamma, config.keep_values ? &values : nullptr);
    out.statistic = best.value / series.sigma;
    out.argmax_k = best.argmax;
    out.reject = best.value > critical;
    out.weighted_values = std::move(values);
    return out;
}

std::vector<std::pair<double, double>> threshold_curve(double gamma, double c, int points) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("threshold_curve: c must be positive");
    }
    if (!(gamma >= 0.0 && gamma <= 0.5)) {
        throw std::invalid_argument("threshold_curve: gamma must lie in [0, 1/2]");
    }
    if (points < 2) {
        throw std::invalid_argument("threshold_curve: need at least 2 grid points");
    }
    std::vector<std::pair<double, double>> curve;
    curve.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        curve.emplace_back(t, c * std::pow(t * (1.0 - t), gamma));
    }
    return curve;
}

} // namespace wbb
