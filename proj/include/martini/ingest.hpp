#ifndef MARTINI_INGEST_HPP
#define MARTINI_INGEST_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "martini/common.hpp"
#include "martini/csv.hpp"
#include "martini/pattern.hpp"
#include "martini/timeutil.hpp"

namespace martini::ingest {

struct ConnectionEvent {
    DateTime timestamp;
    std::string building_id;
    std::string wap_name;
    std::string device_hash;

    bool operator==(const ConnectionEvent&) const = default;
};

struct MeterReading {
    DateTime timestamp;
    std::string building_id;
    double demand_kw = 0.0;
    bool valid = true;  // false: flagged (negative) for the cleaning stage

    bool operator==(const MeterReading&) const = default;
};

struct WapLocation {
    std::string wap_name;
    std::optional<std::string> building;
    std::optional<std::string> floor;
    std::optional<std::string> room;
    bool is_external = false;
};

/// Names not matching the configured pattern belong to externally located WAPs.
inline WapLocation classify_wap(const std::string& wap_name, const NamedPattern& pattern) {
    WapLocation loc;
    loc.wap_name = wap_name;
    const auto captures = pattern.match(wap_name);
    if (!captures) {
        loc.is_external = true;
        return loc;
    }
    if (auto it = captures->find("building"); it != captures->end()) loc.building = it->second;
    if (auto it = captures->find("floor"); it != captures->end()) loc.floor = it->second;
    if (auto it = captures->find("room"); it != captures->end()) loc.room = it->second;
    return loc;
}

struct ParseReport {
    std::size_t data_rows = 0;
    std::size_t parsed = 0;
    std::size_t malformed = 0;
    std::vector<std::string> sample_errors;  // first few diagnostics

    void note_error(std::size_t row, const std::string& what) {
        ++malformed;
        if (sample_errors.size() < 10)
            sample_errors.push_back("row " + std::to_string(row) + ": " + what);
    }
};

/// Optional remapping from canonical field names to the file's column names.
using ColumnSchema = std::map<std::string, std::string>;

inline std::string mapped(const ColumnSchema& schema, const std::string& canonical) {
    auto it = schema.find(canonical);
    return it == schema.end() ? canonical : it->second;
}

struct ParseOptions {
    TimestampFormat ts_format{};
    double malformed_abort_pct = 5.0;
};

namespace detail {

inline void check_abort(const ParseReport& report, const ParseOptions& opts, const std::string& path) {
    if (report.data_rows == 0) return;
    const double pct = 100.0 * static_cast<double>(report.malformed) / static_cast<double>(report.data_rows);
    if (pct > opts.malformed_abort_pct) {
        std::string diag = "too many malformed rows in " + path + ": " + std::to_string(report.malformed) +
                           "/" + std::to_string(report.data_rows) + " (" + format_double(pct) +
                           "% > " + format_double(opts.malformed_abort_pct) + "%)";
        for (const auto& e : report.sample_errors) diag += "\n  " + e;
        throw DataError(diag);
    }
}

}  // namespace detail

/// Every well-formed row yields one event; malformed rows are counted, and the
/// whole parse aborts when they exceed the configured fraction.
inline std::pair<std::vector<ConnectionEvent>, ParseReport> parse_connection_log(
    const std::string& path, const ColumnSchema& schema = {}, const ParseOptions& opts = {}) {
    csv::Reader reader(path);
    const std::size_t c_ts = reader.column(mapped(schema, "timestamp"));
    const std::size_t c_b = reader.column(mapped(schema, "building_id"));
    const std::size_t c_w = reader.column(mapped(schema, "wap_name"));
    const std::size_t c_d = reader.column(mapped(schema, "device_hash"));
    const std::size_t width = reader.columns().size();

    std::vector<ConnectionEvent> events;
    ParseReport report;
    std::vector<std::string> row;
    while (reader.next(row)) {
        ++report.data_rows;
        if (row.size() != width) {
            report.note_error(report.data_rows, "wrong field count");
            continue;
        }
        const auto ts = opts.ts_format.parse(row[c_ts]);
        if (!ts) {
            report.note_error(report.data_rows, "bad timestamp '" + row[c_ts] + "'");
            continue;
        }
        if (row[c_b].empty() || row[c_d].empty()) {
            report.note_error(report.data_rows, "empty building_id or device_hash");
            continue;
        }
        events.push_back({*ts, row[c_b], row[c_w], row[c_d]});
        ++report.parsed;
    }
    detail::check_abort(report, opts, path);
    return {std::move(events), report};
}

/// Readings are typed as kW demand; negative values are kept but flagged
/// invalid so the cleaning stage can treat them as gaps.
inline std::pair<std::vector<MeterReading>, ParseReport> parse_meter_log(
    const std::string& path, const ColumnSchema& schema = {}, const ParseOptions& opts = {}) {
    csv::Reader reader(path);
    const std::size_t c_ts = reader.column(mapped(schema, "timestamp"));
    const std::size_t c_b = reader.column(mapped(schema, "building_id"));
    const std::size_t c_v = reader.column(mapped(schema, "demand_kw"));
    const std::size_t width = reader.columns().size();

    std::vector<MeterReading> readings;
    ParseReport report;
    std::vector<std::string> row;
    while (reader.next(row)) {
        ++report.data_rows;
        if (row.size() != width) {
            report.note_error(report.data_rows, "wrong field count");
            continue;
        }
        const auto ts = opts.ts_format.parse(row[c_ts]);
        if (!ts) {
            report.note_error(report.data_rows, "bad timestamp '" + row[c_ts] + "'");
            continue;
        }
        if (row[c_b].empty()) {
            report.note_error(report.data_rows, "empty building_id");
            continue;
        }
        char* end = nullptr;
        const double kw = std::strtod(row[c_v].c_str(), &end);
        if (row[c_v].empty() || end == nullptr || *end != '\0') {
            report.note_error(report.data_rows, "bad demand value '" + row[c_v] + "'");
            continue;
        }
        readings.push_back({*ts, row[c_b], kw, kw >= 0.0});
        ++report.parsed;
    }
    detail::check_abort(report, opts, path);
    return {std::move(readings), report};
}

inline const std::vector<std::string> kWifiHeader = {"timestamp", "building_id", "wap_name", "device_hash"};
inline const std::vector<std::string> kMeterHeader = {"timestamp", "building_id", "demand_kw"};

inline void write_connection_log(const std::string& path, const std::vector<ConnectionEvent>& events,
                                 const TimestampFormat& fmt = TimestampFormat{}) {
    csv::Writer w(path, kWifiHeader);
    for (const auto& e : events)
        w.row({fmt.format(e.timestamp), e.building_id, e.wap_name, e.device_hash});
}

inline void write_meter_log(const std::string& path, const std::vector<MeterReading>& readings,
                            const TimestampFormat& fmt = TimestampFormat{}) {
    csv::Writer w(path, kMeterHeader);
    for (const auto& r : readings)
        w.row({fmt.format(r.timestamp), r.building_id, format_double(r.demand_kw)});
}

/// Drop events whose WAP is externally located; classification is memoized
/// per name (a name never flips classification within a run).
inline std::vector<ConnectionEvent> filter_internal(const std::vector<ConnectionEvent>& events,
                                                    const NamedPattern& pattern,
                                                    std::map<std::string, WapLocation>* waps_out = nullptr) {
    std::map<std::string, WapLocation> cache;
    std::vector<ConnectionEvent> kept;
    kept.reserve(events.size());
    for (const auto& e : events) {
        auto it = cache.find(e.wap_name);
        if (it == cache.end()) it = cache.emplace(e.wap_name, classify_wap(e.wap_name, pattern)).first;
        if (!it->second.is_external) kept.push_back(e);
    }
    if (waps_out) *waps_out = std::move(cache);
    return kept;
}

}  // namespace martini::ingest

#endif  // MARTINI_INGEST_HPP
