#include "mvlab/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mvlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                        c == '-';
        if (!ok) return false;
    }
    return true;
}

[[noreturn]] void parse_error(const std::string& origin, int line, const std::string& what) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << what;
    throw ConfigError(os.str());
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_error(origin, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section)) {
                parse_error(origin, line_no, "invalid section name '" + section + "'");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            parse_error(origin, line_no, "expected 'key = value', got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) parse_error(origin, line_no, "invalid key '" + key + "'");
        if (!section.empty()) key = section + "." + key;
        auto [it, inserted] = cfg.entries_.try_emplace(key, Entry{value, line_no, false});
        if (!inserted) {
            std::ostringstream os;
            os << "duplicate key '" << key << "' (first defined at line " << it->second.line
               << ")";
            parse_error(origin, line_no, os.str());
        }
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const Config::Entry& Config::lookup(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    }
    it->second.consumed = true;
    return it->second;
}

void Config::fail(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    std::ostringstream os;
    os << origin_;
    if (it != entries_.end() && it->second.line > 0) os << ":" << it->second.line;
    os << ": key '" << key << "': " << what;
    throw ConfigError(os.str());
}

std::string Config::get_string(const std::string& key) const { return lookup(key).value; }

std::string Config::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? lookup(key).value : fallback;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = lookup(key).value;
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE) {
        fail(key, "'" + v + "' is not a number");
    }
    return x;
}

double Config::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

double Config::get_double_in(const std::string& key, double lo, double hi,
                             double fallback) const {
    const double x = get_double_or(key, fallback);
    if (!(lo <= x && x <= hi)) {
        std::ostringstream os;
        os << "value " << x << " outside [" << lo << ", " << hi << "]";
        fail(key, os.str());
    }
    return x;
}

long long Config::get_int(const std::string& key) const {
    const std::string& v = lookup(key).value;
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE) {
        fail(key, "'" + v + "' is not an integer");
    }
    return x;
}

long long Config::get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

long long Config::get_int_in(const std::string& key, long long lo, long long hi,
                             long long fallback) const {
    const long long x = get_int_or(key, fallback);
    if (x < lo || x > hi) {
        std::ostringstream os;
        os << "value " << x << " outside [" << lo << ", " << hi << "]";
        fail(key, os.str());
    }
    return x;
}

std::uint64_t Config::get_uint64_or(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = lookup(key).value;
    errno = 0;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE || v.front() == '-') {
        fail(key, "'" + v + "' is not an unsigned 64-bit integer");
    }
    return static_cast<std::uint64_t>(x);
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = lookup(key).value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "'" + v + "' is not a boolean");
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError("config: invalid key '" + key + "'");
    entries_[key] = Entry{value, 0, false};
}

void Config::require_consumed() const {
    std::vector<std::string> stale;
    for (const auto& [key, entry] : entries_) {
        if (entry.consumed) continue;
        std::ostringstream os;
        os << "'" << key << "'";
        if (entry.line > 0) os << " (line " << entry.line << ")";
        stale.push_back(os.str());
    }
    if (stale.empty()) return;
    std::ostringstream os;
    os << origin_ << ": unknown key";
    if (stale.size() > 1) os << "s";
    os << ": ";
    for (std::size_t i = 0; i < stale.size(); ++i) {
        if (i) os << ", ";
        os << stale[i];
    }
    throw ConfigError(os.str());
}

std::string Config::serialize() const {
    // Sectionless keys first (a key emitted after a [section] header would
    // re-parse into that section), then sections in sorted order.
    std::ostringstream os;
    bool any = false;
    for (const auto& [key, entry] : entries_) {
        if (key.find('.') != std::string::npos) continue;
        os << key << " = " << entry.value << "\n";
        any = true;
    }
    std::string section;
    for (const auto& [key, entry] : entries_) {
        const std::size_t dot = key.find('.');
        if (dot == std::string::npos) continue;
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            if (any) os << "\n";
            os << "[" << sec << "]\n";
            section = sec;
        }
        os << key.substr(dot + 1) << " = " << entry.value << "\n";
        any = true;
    }
    return os.str();
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : serialize()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

bool Config::same_entries(const Config& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    auto it = other.entries_.begin();
    for (const auto& [key, entry] : entries_) {
        if (key != it->first || entry.value != it->second.value) return false;
        ++it;
    }
    return true;
}

}  // namespace mvlab
