#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvlab/config.hpp"

namespace mvlab {

// One measured quantity. pass is 1/0 for assertion rows and -1 for purely
// informational ones; tolerance is NaN when no assertion is attached.
struct ReportRow {
    std::string experiment;
    std::string quantity;
    std::string params;  // flattened "key=value;key=value"
    double value = 0.0;
    double std_error = 0.0;
    double tolerance = 0.0;
    int pass = -1;
    std::uint64_t seed = 0;
    std::string version;
};

struct ExperimentInfo {
    std::string name;
    std::string brief;
};

// All invocable experiments, in presentation order.
const std::vector<ExperimentInfo>& experiment_catalog();

struct RunOutput {
    std::vector<ReportRow> rows;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir;     // from the config's `out` key, may be empty
    bool all_passed = true;  // no row failed
};

// Dispatch by name. Resolves seed (override > config `seed` > 1) and workers
// (config `workers` > PARALLELISM > hardware), runs the experiment, stamps
// every row with experiment/seed/version, and enforces that every config key
// was consumed. Module-level errors become a single failed row; ConfigError
// propagates.
RunOutput run_experiment(const std::string& name, const Config& cfg,
                         std::optional<std::uint64_t> seed_override = std::nullopt);

// Deterministic CSV body for a row list: header plus one line per row,
// RFC-style quoting, %.17g floats, no wall-clock anywhere.
std::string csv_encode(std::span<const ReportRow> rows);
void write_report_csv(const std::string& path, std::span<const ReportRow> rows);

// Sidecar provenance written next to the CSV; wall time lives only here.
struct RunMeta {
    std::string experiment;
    std::uint64_t seed = 0;
    int workers = 1;
    std::uint64_t config_hash = 0;
    std::size_t row_count = 0;
    double elapsed_seconds = 0.0;
    std::string timestamp_utc;
};
void write_meta_json(const std::string& path, const RunMeta& meta);

// Minimal RFC-4180 reader (quotes, embedded separators); returns the field
// matrix including the header line.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Pass/fail digest over every *.csv in a directory.
std::string summarize_report_dir(const std::string& dir);

}  // namespace mvlab
