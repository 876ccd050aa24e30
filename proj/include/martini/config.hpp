#ifndef MARTINI_CONFIG_HPP
#define MARTINI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "martini/common.hpp"
#include "martini/pattern.hpp"
#include "martini/timeutil.hpp"
#include "martini/toml.hpp"

namespace martini {

inline constexpr const char* kDefaultWapPattern =
    "^(?P<building>[A-Za-z0-9]+)-(?P<floor>[0-9]+)-(?P<room>[A-Za-z0-9]+)$";

struct PathsConfig {
    std::string input_dir = ".";
    std::string out_dir = "out";
    std::string synth_spec;  // empty: no generation stage
};

struct IngestConfig {
    std::string wap_pattern = kDefaultWapPattern;
    double malformed_abort_pct = 5.0;
    std::string timestamp_format = "%Y-%m-%d %H:%M:%S";
};

struct PreprocessConfig {
    int short_stay_max_min = 45;
    int regular_max_min = 540;
    double iqr_factor = 1.5;
    int flatline_window_h = 3;
    int max_gap_h = 6;
    std::string norm_scope = "building-semester";
};

struct ClusterConfig {
    int k_min = 2;
    int k_max = 10;
    int restarts = 20;
    std::uint64_t seed = 7;
    int k_override = 0;  // 0: elbow selection
};

struct ScheduleConfig {
    int tau_sign_evening = -1;  // -1 matches the published signal tables
};

struct SavingsConfig {
    std::string mode = "centroid";  // or "actual"
    std::vector<double> deltas = {0.05, 0.10, 0.15};
    int tau = 2;
    std::vector<int> sweep_morning = {0, 1, 2};
    std::vector<int> sweep_evening = {0, -1, -2};
};

struct ReportConfig {
    std::vector<std::string> formats = {"csv", "json", "table"};
};

struct SynthSectionConfig {
    std::uint64_t seed = 1;
};

struct RunConfig {
    PathsConfig paths;
    Date split_date = Date::from_ymd(2019, 8, 23);
    IngestConfig ingest;
    PreprocessConfig preprocess;
    ClusterConfig cluster;
    ScheduleConfig schedule;
    SavingsConfig savings;
    ReportConfig report;
    SynthSectionConfig synth;

    void validate() const {
        if (savings.deltas.empty()) throw ConfigError("savings.delta list must be non-empty");
        for (double d : savings.deltas)
            if (!(d > 0.0 && d < 1.0)) throw ConfigError("delta must be in (0,1)");
        if (savings.tau < 0) throw ConfigError("tau must be >= 0");
        if (savings.mode != "centroid" && savings.mode != "actual")
            throw ConfigError("savings.mode must be 'centroid' or 'actual'");
        if (schedule.tau_sign_evening != 1 && schedule.tau_sign_evening != -1)
            throw ConfigError("schedule.tau_sign_evening must be +1 or -1");
        if (cluster.k_min < 2 || cluster.k_max < cluster.k_min)
            throw ConfigError("cluster k range invalid (need 2 <= k_min <= k_max)");
        if (cluster.restarts < 1) throw ConfigError("cluster.restarts must be >= 1");
        if (preprocess.short_stay_max_min <= 0 ||
            preprocess.regular_max_min <= preprocess.short_stay_max_min)
            throw ConfigError("device class thresholds must satisfy 0 < short < regular");
        if (preprocess.iqr_factor <= 0) throw ConfigError("preprocess.iqr_factor must be > 0");
        if (preprocess.flatline_window_h < 2) throw ConfigError("preprocess.flatline_window_h must be >= 2");
        if (preprocess.max_gap_h < 0) throw ConfigError("preprocess.max_gap_h must be >= 0");
        if (preprocess.norm_scope != "building-semester" && preprocess.norm_scope != "building")
            throw ConfigError("preprocess.norm_scope must be 'building-semester' or 'building'");
        NamedPattern pat(ingest.wap_pattern);  // throws ConfigError when malformed
        for (const char* g : {"building", "floor", "room"})
            if (!pat.has_group(g))
                throw ConfigError(std::string("wap_pattern must name capture group '") + g + "'");
        TimestampFormat fmt(ingest.timestamp_format);
        if (!paths.synth_spec.empty() && !std::filesystem::exists(paths.synth_spec))
            throw ConfigError("synth spec file does not exist: " + paths.synth_spec);
    }

    /// Fingerprint of everything that influences outputs except file locations,
    /// so identical runs into different directories agree.
    std::string fingerprint() const {
        std::ostringstream ss;
        ss << split_date.to_string() << '|' << ingest.wap_pattern << '|' << ingest.malformed_abort_pct
           << '|' << ingest.timestamp_format << '|' << preprocess.short_stay_max_min << '|'
           << preprocess.regular_max_min << '|' << preprocess.iqr_factor << '|'
           << preprocess.flatline_window_h << '|' << preprocess.max_gap_h << '|' << preprocess.norm_scope
           << '|' << cluster.k_min << '|' << cluster.k_max << '|' << cluster.restarts << '|'
           << cluster.seed << '|' << cluster.k_override << '|' << schedule.tau_sign_evening << '|'
           << savings.mode << '|' << savings.tau << '|' << synth.seed;
        for (double d : savings.deltas) ss << '|' << format_double(d);
        for (int a : savings.sweep_morning) ss << '|' << a;
        for (int b : savings.sweep_evening) ss << '|' << b;
        for (const auto& f : report.formats) ss << '|' << f;
        return hex64(fnv1a(ss.str()));
    }
};

namespace detail {

inline std::vector<double> double_list(const toml::Value& v) {
    std::vector<double> out;
    for (const auto& item : v.as_array()) out.push_back(item.as_double());
    return out;
}

inline std::vector<int> int_list(const toml::Value& v) {
    std::vector<int> out;
    for (const auto& item : v.as_array()) out.push_back(static_cast<int>(item.as_int()));
    return out;
}

inline std::vector<std::string> string_list(const toml::Value& v) {
    std::vector<std::string> out;
    for (const auto& item : v.as_array()) out.push_back(item.as_string());
    return out;
}

}  // namespace detail

inline RunConfig config_from_toml(const toml::Table& root) {
    RunConfig cfg;
    if (const auto* v = root.find("split_date")) {
        auto d = Date::parse(v->as_string());
        if (!d) throw ConfigError("split_date must be YYYY-MM-DD");
        cfg.split_date = *d;
    }
    if (const auto* t = root.find("paths")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("input_dir")) cfg.paths.input_dir = v->as_string();
        if (const auto* v = tab.find("out_dir")) cfg.paths.out_dir = v->as_string();
        if (const auto* v = tab.find("synth_spec")) cfg.paths.synth_spec = v->as_string();
    }
    if (const auto* t = root.find("ingest")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("wap_pattern")) cfg.ingest.wap_pattern = v->as_string();
        if (const auto* v = tab.find("malformed_abort_pct")) cfg.ingest.malformed_abort_pct = v->as_double();
        if (const auto* v = tab.find("timestamp_format")) cfg.ingest.timestamp_format = v->as_string();
    }
    if (const auto* t = root.find("preprocess")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("short_stay_max_min")) cfg.preprocess.short_stay_max_min = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("regular_max_min")) cfg.preprocess.regular_max_min = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("iqr_factor")) cfg.preprocess.iqr_factor = v->as_double();
        if (const auto* v = tab.find("flatline_window_h")) cfg.preprocess.flatline_window_h = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("max_gap_h")) cfg.preprocess.max_gap_h = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("norm_scope")) cfg.preprocess.norm_scope = v->as_string();
    }
    if (const auto* t = root.find("cluster")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("k_min")) cfg.cluster.k_min = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("k_max")) cfg.cluster.k_max = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("restarts")) cfg.cluster.restarts = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("seed")) cfg.cluster.seed = static_cast<std::uint64_t>(v->as_int());
        if (const auto* v = tab.find("k_override")) cfg.cluster.k_override = static_cast<int>(v->as_int());
    }
    if (const auto* t = root.find("schedule")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("tau_sign_evening")) cfg.schedule.tau_sign_evening = static_cast<int>(v->as_int());
    }
    if (const auto* t = root.find("savings")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("mode")) cfg.savings.mode = v->as_string();
        if (const auto* v = tab.find("delta")) cfg.savings.deltas = detail::double_list(*v);
        if (const auto* v = tab.find("tau")) cfg.savings.tau = static_cast<int>(v->as_int());
        if (const auto* v = tab.find("sweep_morning")) cfg.savings.sweep_morning = detail::int_list(*v);
        if (const auto* v = tab.find("sweep_evening")) cfg.savings.sweep_evening = detail::int_list(*v);
    }
    if (const auto* t = root.find("report")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("formats")) cfg.report.formats = detail::string_list(*v);
    }
    if (const auto* t = root.find("synth")) {
        const auto& tab = t->as_table();
        if (const auto* v = tab.find("seed")) cfg.synth.seed = static_cast<std::uint64_t>(v->as_int());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    return config_from_toml(toml::parse_file(path));
}

}  // namespace martini

#endif  // MARTINI_CONFIG_HPP
