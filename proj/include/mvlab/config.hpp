#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace mvlab {

// Configuration failures (parse errors, missing/unknown keys, bad values) get
// their own type so the runner can let them crash loudly instead of mapping
// them to failed report rows like module errors.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented `key = value` configuration with optional [section] headers;
// a key inside [sec] is addressed as "sec.key". Parsing is strict: malformed
// lines and duplicate keys fail with the line number, and any key that is
// never consumed by a getter is reported by require_consumed(), so typos in
// option names cannot pass silently.
class Config {
  public:
    Config() = default;

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<inline>");

    bool has(const std::string& key) const;

    // Getters mark the key consumed. The *_or forms apply a default when the
    // key is absent; the plain forms require it.
    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    // Inclusive range check; violations report key, value, and range.
    double get_double_in(const std::string& key, double lo, double hi, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int_or(const std::string& key, long long fallback) const;
    long long get_int_in(const std::string& key, long long lo, long long hi,
                         long long fallback) const;
    std::uint64_t get_uint64_or(const std::string& key, std::uint64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    // Inserts or replaces a key programmatically (CLI overrides).
    void set(const std::string& key, const std::string& value);

    // Throws if any key was never consumed, listing each with its line.
    void require_consumed() const;

    // Canonical text form: sectionless keys first, then sections in sorted
    // order; keys sorted inside each. parse(serialize()) reproduces the map.
    std::string serialize() const;

    // FNV-1a over the canonical serialization.
    std::uint64_t hash() const;

    bool same_entries(const Config& other) const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    const Entry& lookup(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    std::map<std::string, Entry> entries_;
    std::string origin_ = "<empty>";
};

}  // namespace mvlab
