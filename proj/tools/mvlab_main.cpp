#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "mvlab/config.hpp"
#include "mvlab/experiments.hpp"
#include "mvlab/version.hpp"

namespace {

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int cmd_run(const std::string& experiment, const std::string& config_path,
            std::optional<std::uint64_t> seed, const std::string& out_flag) {
    namespace fs = std::filesystem;
    const mvlab::Config cfg = mvlab::Config::parse_file(config_path);

    const auto start = std::chrono::steady_clock::now();
    const mvlab::RunOutput run = mvlab::run_experiment(experiment, cfg, seed);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::string out_dir = !out_flag.empty() ? out_flag
                          : !run.out_dir.empty() ? run.out_dir
                                                 : std::string("reports");
    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / (experiment + ".csv");
    const fs::path meta_path = fs::path(out_dir) / (experiment + ".meta.json");
    mvlab::write_report_csv(csv_path.string(), run.rows);

    mvlab::RunMeta meta;
    meta.experiment = experiment;
    meta.seed = run.seed;
    meta.workers = run.workers;
    meta.config_hash = cfg.hash();
    meta.row_count = run.rows.size();
    meta.elapsed_seconds = elapsed;
    meta.timestamp_utc = utc_now();
    mvlab::write_meta_json(meta_path.string(), meta);

    for (const mvlab::ReportRow& row : run.rows) {
        const char* tag = row.pass == 1 ? "PASS" : row.pass == 0 ? "FAIL" : "info";
        std::printf("%-4s  %-40s %.6g", tag, row.quantity.c_str(), row.value);
        if (row.std_error > 0.0) std::printf("  (se %.2g)", row.std_error);
        std::printf("\n");
    }
    std::printf("wrote %s (%zu rows, seed %llu, %.2fs)\n", csv_path.string().c_str(),
                run.rows.size(), static_cast<unsigned long long>(run.seed), elapsed);
    return run.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification harness for a regularization-by-noise toolkit"};
    app.require_subcommand(1);

    std::string experiment, config_path, out_dir, report_dir;
    std::uint64_t seed_value = 0;

    CLI::App* run = app.add_subcommand("run", "Run one experiment and write CSV + metadata");
    run->add_option("--experiment", experiment, "Experiment name (see list-experiments)")
        ->required();
    run->add_option("--config", config_path, "Path to key = value config file")->required();
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_value, "Override the config seed (64-bit unsigned)");
    run->add_option("--out", out_dir, "Output directory (default: config `out`, else reports/)");

    CLI::App* list = app.add_subcommand("list-experiments", "Print the experiment catalog");

    CLI::App* report = app.add_subcommand("report", "Summarize every report CSV in a directory");
    report->add_option("--in", report_dir, "Directory holding *.csv reports")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::optional<std::uint64_t> seed;
            if (seed_opt->count() > 0) seed = seed_value;
            return cmd_run(experiment, config_path, seed, out_dir);
        }
        if (list->parsed()) {
            for (const mvlab::ExperimentInfo& info : mvlab::experiment_catalog()) {
                std::printf("%-24s %s\n", info.name.c_str(), info.brief.c_str());
            }
            std::printf("version %s, rng %s\n", mvlab::kVersion, mvlab::kRngName);
            return 0;
        }
        if (report->parsed()) {
            std::fputs(mvlab::summarize_report_dir(report_dir).c_str(), stdout);
            return 0;
        }
    } catch (const mvlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
