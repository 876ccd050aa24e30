#ifndef MARTINI_COMMON_HPP
#define MARTINI_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace martini {

/// Thrown for invalid or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown for unreadable or malformed input data (CLI exit code 3).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a pipeline stage cannot complete (CLI exit code 4).
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& msg)
        : std::runtime_error("[" + stage + "] " + msg), stage_name(stage) {}
    std::string stage_name;
};

namespace log {

enum class Level { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

// Verbosity comes from the MARTINI_LOG environment variable
// (off|error|warn|info|debug); default is warn.
inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("MARTINI_LOG");
        if (!env) return Level::Warn;
        std::string s(env);
        std::transform(s.begin(), s.end(), s.begin(), ::tolower);
        if (s == "off" || s == "none") return Level::Off;
        if (s == "error") return Level::Error;
        if (s == "warn" || s == "warning") return Level::Warn;
        if (s == "info") return Level::Info;
        if (s == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

inline void write(Level lvl, const char* tag, const char* fmt, std::va_list args) {
    if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

inline void error(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    write(Level::Error, "error", fmt, args);
    va_end(args);
}

inline void warn(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    write(Level::Warn, "warn", fmt, args);
    va_end(args);
}

inline void info(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    write(Level::Info, "info", fmt, args);
    va_end(args);
}

inline void debug(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    write(Level::Debug, "debug", fmt, args);
    va_end(args);
}

}  // namespace log

/// FNV-1a 64-bit hash, used for manifest fingerprints of inputs and artifacts.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string hash_file(const std::string& path) { return hex64(fnv1a(read_file(path))); }

/// Linear-interpolation quantile (numpy default) on an unsorted sample.
inline double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw DataError("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    if (xs.size() == 1) return xs[0];
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

/// Shortest round-trip decimal text for a double; deterministic across runs.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace martini

#endif  // MARTINI_COMMON_HPP
