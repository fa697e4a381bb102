#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
    const std::string command = std::string(WBB_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) {
        result.stdout_text += buf.data();
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

nlohmann::json parse_json(const std::string& text) {
    return nlohmann::json::parse(text);
}

} // namespace

TEST_CASE("help and version exit cleanly; unknown flags are usage errors") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("quantile --help").exit_code == 0);
    CHECK(run_cli("--version").exit_code == 0);
    CHECK(run_cli("quantile --definitely-not-a-flag 3").exit_code == 64);
    CHECK(run_cli("").exit_code == 64);
    CHECK(run_cli("bench").exit_code == 64);
}

TEST_CASE("help text documents every quantile flag") {
    const CliResult help = run_cli("quantile --help");
    for (const char* flag : {"--eta", "--gamma", "--q", "--epsilon", "--seed", "--engine",
                             "--workers", "--ci-level", "--precompute-m", "--i-max",
                             "--eq-calibration"}) {
        CHECK(help.stdout_text.find(flag) != std::string::npos);
    }
}

TEST_CASE("quantile subcommand: JSON output and determinism") {
    const std::string args = "quantile --eta 0 --gamma 0 --q 0.95 --epsilon 0.05 --seed 7";
    const CliResult r1 = run_cli(args);
    REQUIRE(r1.exit_code == 0);
    const auto j1 = parse_json(r1.stdout_text);
    CHECK(j1.at("k0").get<long long>() == 400);
    CHECK(j1.at("engine").get<std::string>() == "adaptive");
    const double quantile = j1.at("quantile").get<double>();
    CHECK(quantile > 1.1);
    CHECK(quantile < 1.7);
    CHECK(j1.at("ci_lo").get<double>() <= quantile);
    CHECK(quantile <= j1.at("ci_hi").get<double>());
    CHECK(j1.contains("elapsed_sec"));
    CHECK(j1.at("seed").get<long long>() == 7);

    // Same invocation twice (and with a different worker count): identical
    // output apart from the wall-clock fields.
    const CliResult r2 = run_cli(args + " --workers 1");
    REQUIRE(r2.exit_code == 0);
    auto j2 = parse_json(r2.stdout_text);
    auto j1c = j1;
    for (auto* j : {&j1c, &j2}) {
        j->erase("elapsed_sec");
        j->erase("sampling_sec");
        j->erase("workers");
    }
    CHECK(j1c.dump() == j2.dump());
}

TEST_CASE("quantile subcommand rejects the excluded weight pair with exit 64") {
    const CliResult r = run_cli("quantile --gamma 0.5 --eta 0 --epsilon 0.1");
    CHECK(r.exit_code == 64);
}

TEST_CASE("quantile subcommand reports precompute divergence with exit 2") {
    const CliResult r =
        run_cli("quantile --gamma 0.45 --epsilon 1e-9 --i-max 0 --precompute-m 5 --seed 1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("critical-value subcommand across sources") {
    const CliResult kolmo = run_cli("critical-value --source kolmogorov --alpha 0.05");
    REQUIRE(kolmo.exit_code == 0);
    CHECK(parse_json(kolmo.stdout_text).at("critical_value").get<double>() ==
          doctest::Approx(1.3581).epsilon(5e-4));

    const CliResult de = run_cli(
        "critical-value --source darling-erdos --gamma 0.5 --n 1000 --alpha 0.05 --variant one-sided");
    REQUIRE(de.exit_code == 0);
    CHECK(parse_json(de.stdout_text).at("critical_value").get<double>() ==
          doctest::Approx(3.353).epsilon(2e-4));

    CHECK(run_cli("critical-value --source darling-erdos --gamma 0.25 --n 100").exit_code == 64);
    CHECK(run_cli("critical-value --source kolmogorov --gamma 0.25").exit_code == 64);
}

TEST_CASE("critical-value emits a threshold curve") {
    const CliResult r = run_cli(
        "critical-value --source kolmogorov --alpha 0.05 --curve 3 --curve-out cli_curve_tmp.csv");
    REQUIRE(r.exit_code == 0);
    std::ifstream in("cli_curve_tmp.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,f");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);
    in.close();
    std::remove("cli_curve_tmp.csv");
}

TEST_CASE("test subcommand: constant column never rejects") {
    {
        std::ofstream out("cli_const_tmp.csv");
        out << "t,value\n";
        for (int i = 0; i < 50; ++i) out << i << ",4.25\n";
    }
    const CliResult r = run_cli(
        "test --input cli_const_tmp.csv --column value --critical-source kolmogorov --sigma 1");
    REQUIRE(r.exit_code == 0);
    const auto j = parse_json(r.stdout_text);
    CHECK(j.at("reject").get<bool>() == false);
    CHECK(j.at("statistic").get<double>() < 1e-9);
    CHECK(j.at("sigma_source").get<std::string>() == "user");
    std::remove("cli_const_tmp.csv");
}

TEST_CASE("test subcommand: an obvious mean shift rejects") {
    {
        std::ofstream out("cli_shift_tmp.txt");
        for (int i = 0; i < 500; ++i) {
            const double noise = 0.3 * ((i * 2654435761u % 1000) / 1000.0 - 0.5);
            out << (i >= 250 ? 1.0 : 0.0) + noise << "\n";
        }
    }
    const CliResult r = run_cli(
        "test --input cli_shift_tmp.txt --critical-source kolmogorov --sigma 0.3 --alpha 0.05");
    REQUIRE(r.exit_code == 0);
    const auto j = parse_json(r.stdout_text);
    CHECK(j.at("reject").get<bool>() == true);
    const auto k = j.at("argmax_k").get<long long>();
    CHECK(k > 200);
    CHECK(k < 300);
    std::remove("cli_shift_tmp.txt");
}

TEST_CASE("test subcommand maps data problems to exit 65") {
    CHECK(run_cli("test --input cli_missing_tmp.txt").exit_code == 65);
    {
        std::ofstream out("cli_bad_tmp.txt");
        out << "1.0\nbroken\n";
    }
    CHECK(run_cli("test --input cli_bad_tmp.txt --critical-source kolmogorov").exit_code == 65);
    std::remove("cli_bad_tmp.txt");
    CHECK(run_cli("test --input cli_bad_tmp.txt --critical-source darling-erdos --gamma 0.25")
              .exit_code == 65); // unreadable file wins before validation
}

TEST_CASE("bench strong subcommand writes the CSV schema") {
    const CliResult r = run_cli(
        "bench strong --engine equidistant --gamma 0.25 --n-sweep 10 --n-sweep 20 --n-sweep 40 "
        "--n-sweep 80 --replications 30 --seed 3 --out-dir cli_bench_tmp");
    REQUIRE(r.exit_code == 0);
    const auto j = parse_json(r.stdout_text);
    const std::string csv = j.at("csv").get<std::string>();
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "sweep,engine,eta,gamma,q,error,error_hw,time_sec,time_hw");
    in.close();
    CHECK(j.at("slope_vs_sweep").get<double>() < 0.0);
    std::remove(csv.c_str());
    std::remove("cli_bench_tmp");
}

TEST_CASE("bench quantile subcommand with an explicit sweep") {
    const CliResult r = run_cli(
        "bench quantile --engine adaptive --gamma 0 --eps-sweep 0.5 --eps-sweep 0.35 "
        "--replications 5 --seed 11 --out-dir cli_bench_tmp2");
    REQUIRE(r.exit_code == 0);
    const auto j = parse_json(r.stdout_text);
    CHECK(j.at("reference").get<double>() == doctest::Approx(1.3581).epsilon(1e-3));
    const std::string csv = j.at("csv").get<std::string>();
    std::ifstream in(csv);
    REQUIRE(in.good());
    in.close();
    std::remove(csv.c_str());
    std::remove("cli_bench_tmp2");
}

TEST_CASE("bench quantile refuses unknown references") {
    CHECK(run_cli("bench quantile --gamma 0.3 --eps-sweep 0.5 --replications 2 "
                  "--out-dir cli_bench_tmp3").exit_code == 64);
}

TEST_CASE("file system failures map to exit 66") {
    {
        std::ofstream out("cli_blocker_tmp");
        out << "x";
    }
    // The output directory path runs through a regular file.
    CHECK(run_cli("bench strong --engine equidistant --gamma 0.25 --n-sweep 10 --n-sweep 20 "
                  "--replications 3 --out-dir cli_blocker_tmp/sub").exit_code == 66);
    std::remove("cli_blocker_tmp");
    // Missing calibration file for the equidistant engine.
    CHECK(run_cli("quantile --engine equidistant --gamma 0.25 --epsilon 0.2 "
                  "--eq-calibration cli_no_such_calibration.json").exit_code == 66);
}
