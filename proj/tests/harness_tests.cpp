#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvlab/config.hpp"
#include "mvlab/estimators.hpp"
#include "mvlab/experiments.hpp"
#include "mvlab/version.hpp"

using namespace mvlab;

namespace {

std::filesystem::path temp_dir(const char* tag) {
    auto dir = std::filesystem::temp_directory_path() /
               (std::string("mvlab_test_") + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double simpson2d(const std::function<double(double, double)>& f, double lo, double hi, int n) {
    // Tensor Simpson with n panels per axis (n even via 2n+1 points).
    const double h = (hi - lo) / (2 * n);
    auto w1 = [&](int i) { return i == 0 || i == 2 * n ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double acc = 0.0;
    for (int i = 0; i <= 2 * n; ++i)
        for (int j = 0; j <= 2 * n; ++j)
            acc += w1(i) * w1(j) * f(lo + i * h, lo + j * h);
    return acc * h * h / 9.0;
}

}  // namespace

TEST_CASE("config parses the minimal example with defaults applied") {
    const Config cfg = Config::parse_string("experiment = eta_check\nn = 4\nt = 1\n");
    CHECK(cfg.get_string("experiment") == "eta_check");
    CHECK(cfg.get_int_in("n", 1, 12, 8) == 4);
    CHECK(cfg.get_double_in("t", 0.01, 16.0, 1.0) == 1.0);
    CHECK(cfg.get_int_in("u_points", 100, 100000, 4000) == 4000);  // default applies
    CHECK_NOTHROW(cfg.require_consumed());
}

TEST_CASE("unknown keys are fatal with the offending name and line") {
    const Config cfg = Config::parse_string("experiment = eta_check\nstepsz = 1\n");
    cfg.get_string("experiment");
    CHECK_THROWS_WITH_AS(cfg.require_consumed(),
                         doctest::Contains("stepsz"), ConfigError);
    try {
        cfg.require_consumed();
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);  // line number
    }
}

TEST_CASE("malformed and duplicate lines are rejected at parse time") {
    CHECK_THROWS_AS((void)Config::parse_string("novalue\n"), ConfigError);
    CHECK_THROWS_AS((void)Config::parse_string("[broken\nk = 1\n"), ConfigError);
    CHECK_THROWS_WITH_AS((void)Config::parse_string("a = 1\na = 2\n"),
                         doctest::Contains("duplicate"), ConfigError);
}

TEST_CASE("range violations name the key and bounds") {
    const Config cfg = Config::parse_string("t = 99\n");
    CHECK_THROWS_WITH_AS((void)cfg.get_double_in("t", 0.01, 16.0, 1.0),
                         doctest::Contains("outside"), ConfigError);
}

TEST_CASE("config round-trips through serialize and parse") {
    const Config cfg = Config::parse_string(
        "experiment = j_terms\nsamples = 2000000\nt_values = 0.25,0.5,1\n"
        "[mc]\nchunk = 256\n");
    const Config back = Config::parse_string(cfg.serialize(), "<roundtrip>");
    CHECK(cfg.same_entries(back));
    CHECK(cfg.hash() == back.hash());
    CHECK(back.has("mc.chunk"));
}

TEST_CASE("csv encoding is deterministic and survives hostile fields") {
    ReportRow row;
    row.experiment = "demo";
    row.quantity = "q,uote\"and\nnewline";
    row.params = " leading and trailing ";
    row.value = 0.1 + 0.2;
    row.std_error = 1e-17;
    row.tolerance = std::nan("");
    row.pass = -1;
    row.seed = 123456789012345ull;
    row.version = kVersion;
    ReportRow plain = row;
    plain.quantity = "plain";
    plain.params = "a=1;b=2";
    plain.tolerance = 0.5;
    plain.pass = 1;

    const std::vector<ReportRow> rows = {row, plain};
    const std::string body = csv_encode(rows);
    CHECK(body == csv_encode(rows));  // byte determinism
    CHECK(body.substr(0, body.find('\n')) ==
          "experiment,quantity,params,value,std_error,tolerance,pass,seed,version");

    const auto table = parse_csv(body);
    REQUIRE(table.size() == 3);
    CHECK(table[1][1] == row.quantity);
    CHECK(table[1][2] == row.params);
    CHECK(std::strtod(table[1][3].c_str(), nullptr) == row.value);
    CHECK(table[1][5].empty());       // NaN tolerance encodes as empty
    CHECK(table[1][6].empty());       // info rows carry no pass verdict
    CHECK(table[2][6] == "pass");
    CHECK(table[2][8] == kVersion);
}

TEST_CASE("report files and sidecar metadata land on disk") {
    const auto dir = temp_dir("report");
    ReportRow row;
    row.experiment = "demo";
    row.quantity = "value";
    row.value = 1.5;
    row.tolerance = 2.0;
    row.pass = 1;
    row.seed = 7;
    row.version = kVersion;
    const std::vector<ReportRow> rows = {row};
    write_report_csv((dir / "demo.csv").string(), rows);

    RunMeta meta;
    meta.experiment = "demo";
    meta.seed = 7;
    meta.workers = 2;
    meta.config_hash = 0xabcdef0123456789ull;
    meta.row_count = 1;
    meta.elapsed_seconds = 0.25;
    meta.timestamp_utc = "2026-01-01T00:00:00Z";
    write_meta_json((dir / "demo.meta.json").string(), meta);

    const auto parsed = nlohmann::json::parse(slurp(dir / "demo.meta.json"));
    CHECK(parsed.at("experiment") == "demo");
    CHECK(parsed.at("seed") == 7);
    CHECK(parsed.at("config_hash_fnv1a64") == "abcdef0123456789");
    CHECK(parsed.at("row_count") == 1);
    CHECK(parsed.at("rng") == kRngName);
    CHECK(parsed.at("version") == kVersion);

    const std::string digest = summarize_report_dir(dir.string());
    CHECK(digest.find("demo.csv") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("summary flags failing rows by quantity") {
    const auto dir = temp_dir("summary");
    ReportRow good;
    good.experiment = "demo";
    good.quantity = "fine";
    good.pass = 1;
    ReportRow bad = good;
    bad.quantity = "broken_quantity";
    bad.pass = 0;
    const std::vector<ReportRow> rows = {good, bad};
    write_report_csv((dir / "demo.csv").string(), rows);
    const std::string digest = summarize_report_dir(dir.string());
    CHECK(digest.find("FAIL") != std::string::npos);
    CHECK(digest.find("broken_quantity") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run_experiment stamps provenance and validates names") {
    const Config cfg = Config::parse_string("experiment = half_factorial_series\n");
    const RunOutput out = run_experiment("half_factorial_series", cfg);
    CHECK(out.all_passed);
    REQUIRE(!out.rows.empty());
    for (const ReportRow& row : out.rows) {
        CHECK(row.experiment == "half_factorial_series");
        CHECK(row.seed == 1);
        CHECK(row.version == kVersion);
    }

    CHECK_THROWS_AS((void)run_experiment("no_such_thing", Config()), ConfigError);
    const Config mismatched = Config::parse_string("experiment = eta_check\n");
    CHECK_THROWS_AS((void)run_experiment("j_terms", mismatched), ConfigError);
}

TEST_CASE("seed override beats the config seed") {
    const Config cfg = Config::parse_string("experiment = half_factorial_series\nseed = 5\n");
    const RunOutput with_cfg = run_experiment("half_factorial_series", cfg);
    CHECK(with_cfg.seed == 5);
    const RunOutput with_override = run_experiment("half_factorial_series", cfg, 9);
    CHECK(with_override.seed == 9);
    for (const ReportRow& row : with_override.rows) CHECK(row.seed == 9);
}

TEST_CASE("module errors become a failed row instead of a crash") {
    // The sign drift has no derivative, so the flow-derivative experiment
    // must fail as data, not as an exception.
    const Config cfg = Config::parse_string("experiment = flow_derivative_check\ndrift = sign\n");
    const RunOutput out = run_experiment("flow_derivative_check", cfg);
    CHECK(!out.all_passed);
    REQUIRE(out.rows.size() == 1);
    CHECK(out.rows[0].quantity == "error");
    CHECK(out.rows[0].pass == 0);
}

TEST_CASE("experiment catalog lists all experiments uniquely") {
    const auto& catalog = experiment_catalog();
    CHECK(catalog.size() == 18);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        CHECK(!catalog[i].brief.empty());
        for (std::size_t j = i + 1; j < catalog.size(); ++j)
            CHECK(catalog[i].name != catalog[j].name);
    }
}

TEST_CASE("checked-in config files parse and name their experiment") {
    const std::filesystem::path dir = "configs";
    REQUIRE(std::filesystem::is_directory(dir));
    const auto& catalog = experiment_catalog();
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".cfg") continue;
        const Config cfg = Config::parse_file(entry.path().string());
        const std::string name = cfg.get_string("experiment");
        CHECK(name == entry.path().stem().string());
        bool known = false;
        for (const auto& info : catalog) known = known || info.name == name;
        CHECK(known);
        ++seen;
    }
    CHECK(seen == catalog.size());
}

TEST_CASE("divergence absolute moment matches an independent 2d quadrature") {
    // On the grid (1, 2) the order-2 divergence is -2 W1^2 + 3 W1 W2 - W2^2 + 1.
    // With W1 = g1 and W2 = g1 + g2 over independent standard normals this is
    // g1 g2 - g2^2 + 1, so E|Lambda| reduces to a smooth 2d Gaussian integral
    // of an absolute value, done here by brute tensor Simpson.
    auto integrand = [](double g1, double g2) {
        const double lam = g1 * g2 - g2 * g2 + 1.0;
        const double w = std::exp(-0.5 * (g1 * g1 + g2 * g2)) / (2.0 * M_PI);
        return std::abs(lam) * w;
    };
    const double oracle = simpson2d(integrand, -8.0, 8.0, 400);
    CHECK(lambda_abs_mean(1.0, 2.0) == doctest::Approx(oracle).epsilon(5e-4));
}

TEST_CASE("absolute moment of the centered square has its closed form") {
    // E|G^2 - 1| = 4 phi(1) for the standard normal density phi.
    const double target = 4.0 * std::exp(-0.5) / std::sqrt(2.0 * M_PI);
    CHECK(abs_moment_g2m1() == doctest::Approx(target).epsilon(1e-10));
}
