#include <wbb.h>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

TEST_CASE("version and reference distributions through the C surface") {
    CHECK(std::strlen(wbb_version()) > 0);

    double v = 0.0;
    CHECK(wbb_std_normal_cdf(0.0, &v) == WBB_OK);
    CHECK(v == doctest::Approx(0.5));

    CHECK(wbb_kolmogorov_quantile(0.95, &v) == WBB_OK);
    CHECK(v == doctest::Approx(1.3581).epsilon(5e-4));

    CHECK(wbb_kolmogorov_cdf(-1.0, &v) == WBB_ERR_DOMAIN);
    CHECK(std::strlen(wbb_last_error()) > 0);

    CHECK(wbb_darling_erdos_critical(100, 0.05, 1.0, WBB_DE_ONE_SIDED, &v) == WBB_OK);
    CHECK(v == doctest::Approx(3.241).epsilon(2e-4));
    CHECK(wbb_darling_erdos_critical(2, 0.05, 1.0, WBB_DE_AS_STATED, &v) == WBB_ERR_DOMAIN);
}

TEST_CASE("sup approximation handles both engines and rejects bad codes") {
    double v = 0.0;
    CHECK(wbb_sup_approx(0.0, 0.25, WBB_ENGINE_ADAPTIVE, 1, 0, 200, &v) == WBB_OK);
    CHECK(v > 0.0);
    double w = 0.0;
    CHECK(wbb_sup_approx(0.0, 0.25, WBB_ENGINE_ADAPTIVE, 1, 0, 200, &w) == WBB_OK);
    CHECK(w == v); // same (seed, stream): bit-identical
    CHECK(wbb_sup_approx(0.0, 0.25, WBB_ENGINE_EQUIDISTANT, 1, 0, 200, &v) == WBB_OK);
    CHECK(v > 0.0);
    CHECK(wbb_sup_approx(0.0, 0.25, 17, 1, 0, 200, &v) == WBB_ERR_INVALID_ARGUMENT);
    CHECK(wbb_sup_approx(0.0, 0.5, WBB_ENGINE_ADAPTIVE, 1, 0, 200, &v) ==
          WBB_ERR_INVALID_ARGUMENT); // excluded pair
}

TEST_CASE("quantile pipeline through the C surface") {
    wbb_quantile_request req;
    wbb_quantile_request_init(&req);
    CHECK(req.q == 0.95);
    CHECK(req.epsilon == 0.01);
    req.epsilon = 0.05;
    req.seed = 7;
    req.workers = 2;

    wbb_quantile_result res;
    CHECK(wbb_compute_quantile(&req, &res) == WBB_OK);
    CHECK(res.k0 == 400);
    CHECK(res.ci_valid == 1);
    CHECK(res.ci_lo <= res.quantile);
    CHECK(res.quantile <= res.ci_hi);
    CHECK(std::fabs(res.quantile - 1.3581) < 0.15);

    wbb_quantile_result res2;
    CHECK(wbb_compute_quantile(&req, &res2) == WBB_OK);
    CHECK(res2.quantile == res.quantile);
    CHECK(res2.n0 == res.n0);

    req.gamma = 0.5; // excluded with eta = 0
    CHECK(wbb_compute_quantile(&req, &res) == WBB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("series handles and the change-point test") {
    std::vector<double> xs(200);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = (i % 7) * 0.25 - 0.75 + (i >= 100 ? 3.0 : 0.0);
    }
    wbb_series* series = nullptr;
    REQUIRE(wbb_series_from_array(xs.data(), xs.size(), &series) == WBB_OK);
    size_t n = 0;
    CHECK(wbb_series_size(series, &n) == WBB_OK);
    CHECK(n == xs.size());

    wbb_test_options opt;
    wbb_test_options_init(&opt);
    opt.critical_source = WBB_CRITICAL_KOLMOGOROV;
    opt.sigma = 1.0;
    wbb_test_result res;
    CHECK(wbb_run_test(series, &opt, &res) == WBB_OK);
    CHECK(res.reject == 1); // a 3-sigma shift halfway is unmissable
    CHECK(res.argmax_k > 80);
    CHECK(res.argmax_k < 120);

    opt.critical_source = WBB_CRITICAL_DARLING_ERDOS;
    CHECK(wbb_run_test(series, &opt, &res) == WBB_ERR_INVALID_ARGUMENT); // gamma != 1/2
    opt.gamma = 0.5;
    CHECK(wbb_run_test(series, &opt, &res) == WBB_OK);

    std::vector<double> values(xs.size() - 1);
    CHECK(wbb_cusum_values(series, 0.0, 0.25, values.data()) == WBB_OK);
    CHECK(values[99] > 0.0);

    wbb_series_free(series);
}

TEST_CASE("series reading errors surface as data errors") {
    {
        std::ofstream out("capi_bad_tmp.txt");
        out << "1.0\nnot-a-number\n";
    }
    wbb_series* series = nullptr;
    CHECK(wbb_series_read("capi_bad_tmp.txt", nullptr, &series) == WBB_ERR_DATA);
    CHECK(wbb_series_read("capi_missing_tmp.txt", nullptr, &series) == WBB_ERR_DATA);
    std::remove("capi_bad_tmp.txt");
}

TEST_CASE("threshold curve through the C surface") {
    double ts[5];
    double fs[5];
    CHECK(wbb_threshold_curve(0.0, 1.358, 5, ts, fs) == WBB_OK);
    CHECK(ts[0] == 0.0);
    CHECK(ts[4] == 1.0);
    CHECK(fs[2] == doctest::Approx(1.358));
    CHECK(wbb_threshold_curve(0.25, -1.0, 5, ts, fs) == WBB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("bench entry points write CSV files and report slopes") {
    namespace fs = std::filesystem;
    const std::string dir = "capi_bench_tmp";
    wbb_bench_result res;
    const std::vector<uint64_t> sweep{10, 20, 40, 80};
    CHECK(wbb_bench_strong(0.0, 0.25, WBB_ENGINE_EQUIDISTANT, sweep.data(), sweep.size(), 40, 4, 3,
                           2, dir.c_str(), nullptr, &res) == WBB_OK);
    CHECK(fs::exists(res.csv_path));
    CHECK(res.slope_vs_sweep < 0.0);

    const std::string calib = dir + "/calibration.json";
    CHECK(wbb_bench_strong(0.0, 0.25, WBB_ENGINE_EQUIDISTANT, sweep.data(), sweep.size(), 40, 4, 3,
                           2, dir.c_str(), calib.c_str(), &res) == WBB_OK);
    CHECK(fs::exists(calib));

    const std::vector<double> eps{0.5, 0.3};
    CHECK(wbb_bench_quantile(0.0, 0.0, 0.95, WBB_ENGINE_ADAPTIVE, eps.data(), eps.size(), 8,
                             1.3580986393225505, 5, 2, dir.c_str(), nullptr, &res) == WBB_OK);
    CHECK(fs::exists(res.csv_path));

    fs::remove_all(dir);
}
