#ifndef MARTINI_PREPROCESS_HPP
#define MARTINI_PREPROCESS_HPP

#include <array>
#include <bitset>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "martini/common.hpp"
#include "martini/csv.hpp"
#include "martini/ingest.hpp"
#include "martini/timeutil.hpp"

namespace martini::preprocess {

enum class Quality { Observed, Interpolated, Nullified, ZeroFilled };

inline const char* quality_name(Quality q) {
    switch (q) {
        case Quality::Observed: return "observed";
        case Quality::Interpolated: return "interpolated";
        case Quality::Nullified: return "nullified";
        default: return "zerofilled";
    }
}

inline std::optional<Quality> parse_quality(const std::string& s) {
    if (s == "observed") return Quality::Observed;
    if (s == "interpolated") return Quality::Interpolated;
    if (s == "nullified") return Quality::Nullified;
    if (s == "zerofilled") return Quality::ZeroFilled;
    return std::nullopt;
}

enum class SeriesKind { OccupantCount, DemandKw };

inline const char* kind_name(SeriesKind k) {
    return k == SeriesKind::OccupantCount ? "occupant_count" : "demand_kw";
}

inline std::optional<SeriesKind> parse_kind(const std::string& s) {
    if (s == "occupant_count") return SeriesKind::OccupantCount;
    if (s == "demand_kw") return SeriesKind::DemandKw;
    return std::nullopt;
}

/// One hourly sample. Nullified samples carry no numeric value.
struct Sample {
    double value = std::numeric_limits<double>::quiet_NaN();
    Quality quality = Quality::Nullified;

    bool valid() const { return quality != Quality::Nullified; }
    static Sample nullified() { return {}; }
};

/// Per-building hourly series covering whole days: exactly 24 samples per day.
struct HourlySeries {
    std::string building_id;
    SeriesKind kind = SeriesKind::DemandKw;
    Date start;
    std::vector<Sample> values;
    std::vector<std::string> warnings;

    int days() const { return static_cast<int>(values.size() / 24); }
    Date date_of(std::size_t index) const { return start + static_cast<int>(index / 24); }
    Sample& at(int day, int hour) { return values[static_cast<std::size_t>(day) * 24 + hour]; }
    const Sample& at(int day, int hour) const { return values[static_cast<std::size_t>(day) * 24 + hour]; }

    /// The 24 raw values of one day, or nullopt unless every hour is valid.
    std::optional<std::array<double, 24>> complete_day(int day) const {
        std::array<double, 24> out{};
        for (int h = 0; h < 24; ++h) {
            const Sample& s = at(day, h);
            if (!s.valid()) return std::nullopt;
            out[h] = s.value;
        }
        return out;
    }
};

enum class DeviceClass { ShortStay, Regular, Stationary };

inline const char* device_class_name(DeviceClass c) {
    switch (c) {
        case DeviceClass::ShortStay: return "short_stay";
        case DeviceClass::Regular: return "regular";
        default: return "stationary";
    }
}

struct DeviceDayStats {
    std::string device_hash;
    std::string building_id;
    Date date;
    int connected_minutes = 0;
    DeviceClass device_class = DeviceClass::ShortStay;
};

struct ClassThresholds {
    int short_stay_max_min = 45;   // below this: short stay
    int regular_max_min = 540;     // above this: stationary

    DeviceClass classify(int minutes) const {
        if (minutes < short_stay_max_min) return DeviceClass::ShortStay;
        if (minutes <= regular_max_min) return DeviceClass::Regular;
        return DeviceClass::Stationary;
    }
};

namespace detail {

constexpr int kSlotsPerDay = 288;
constexpr int kSlotsPerHour = 12;

struct DeviceDayKey {
    std::string building_id;
    std::string device_hash;
    std::int32_t date_days = 0;
};

struct DeviceDayKeyView {
    const std::string* building_id;
    const std::string* device_hash;
    std::int32_t date_days;
};

struct DeviceDayKeyLess {
    using is_transparent = void;

    static int cmp(const std::string& b1, const std::string& d1, std::int32_t t1,
                   const std::string& b2, const std::string& d2, std::int32_t t2) {
        if (int c = b1.compare(b2)) return c;
        if (t1 != t2) return t1 < t2 ? -1 : 1;
        return d1.compare(d2);
    }
    bool operator()(const DeviceDayKey& a, const DeviceDayKey& b) const {
        return cmp(a.building_id, a.device_hash, a.date_days, b.building_id, b.device_hash, b.date_days) < 0;
    }
    bool operator()(const DeviceDayKey& a, const DeviceDayKeyView& b) const {
        return cmp(a.building_id, a.device_hash, a.date_days, *b.building_id, *b.device_hash, b.date_days) < 0;
    }
    bool operator()(const DeviceDayKeyView& a, const DeviceDayKey& b) const {
        return cmp(*a.building_id, *a.device_hash, a.date_days, b.building_id, b.device_hash, b.date_days) < 0;
    }
};

using DeviceDaySlots = std::map<DeviceDayKey, std::bitset<kSlotsPerDay>, DeviceDayKeyLess>;

/// One connection event marks its whole five-minute slot (the logs time out
/// every five minutes); connected minutes are 5 x distinct slots.
inline DeviceDaySlots group_device_days(const std::vector<ingest::ConnectionEvent>& events) {
    DeviceDaySlots grouped;
    for (const auto& e : events) {
        const DeviceDayKeyView view{&e.building_id, &e.device_hash, e.timestamp.date.days};
        auto it = grouped.find(view);
        if (it == grouped.end())
            it = grouped.emplace(DeviceDayKey{e.building_id, e.device_hash, e.timestamp.date.days},
                                 std::bitset<kSlotsPerDay>{}).first;
        it->second.set(static_cast<std::size_t>(e.timestamp.slot()));
    }
    return grouped;
}

}  // namespace detail

/// Each (device, building, date) gets its connected minutes and class.
/// Output is ordered by (building, date, device).
inline std::vector<DeviceDayStats> classify_devices(const std::vector<ingest::ConnectionEvent>& events,
                                                    const ClassThresholds& thresholds = {}) {
    const auto grouped = detail::group_device_days(events);
    std::vector<DeviceDayStats> stats;
    stats.reserve(grouped.size());
    for (const auto& [key, slots] : grouped) {
        const int minutes = static_cast<int>(slots.count()) * 5;
        stats.push_back({key.device_hash, key.building_id, Date{key.date_days}, minutes,
                         thresholds.classify(minutes)});
    }
    return stats;
}

/// Hourly occupant counts per building: ceil of the mean regular-device count
/// over the hour's twelve slots; hours without any connection activity get a
/// zero-filled sample. Only regular devices contribute to counts.
inline std::vector<HourlySeries> occupancy_series(const std::vector<DeviceDayStats>& stats,
                                                  const std::vector<ingest::ConnectionEvent>& events) {
    using namespace detail;
    const auto grouped = group_device_days(events);

    std::map<DeviceDayKey, DeviceClass, DeviceDayKeyLess> class_of;
    for (const auto& s : stats)
        class_of[DeviceDayKey{s.building_id, s.device_hash, s.date.days}] = s.device_class;

    struct BuildingAccum {
        Date first, last;
        // (date -> per-slot regular counts, per-slot any-activity marks)
        std::map<std::int32_t, std::array<int, kSlotsPerDay>> slot_counts;
        std::map<std::int32_t, std::bitset<kSlotsPerDay>> active;
    };
    std::map<std::string, BuildingAccum> per_building;

    for (const auto& [key, slots] : grouped) {
        auto [it, inserted] = per_building.try_emplace(key.building_id);
        BuildingAccum& acc = it->second;
        const Date d{key.date_days};
        if (inserted) {
            acc.first = acc.last = d;
        } else {
            acc.first = std::min(acc.first, d);
            acc.last = std::max(acc.last, d);
        }
        acc.active[key.date_days] |= slots;
        auto cit = class_of.find(key);
        const bool regular = cit != class_of.end() && cit->second == DeviceClass::Regular;
        if (regular) {
            auto& counts = acc.slot_counts[key.date_days];
            for (int s = 0; s < kSlotsPerDay; ++s)
                if (slots.test(static_cast<std::size_t>(s))) ++counts[s];
        }
    }

    std::vector<HourlySeries> out;
    for (auto& [building, acc] : per_building) {
        HourlySeries series;
        series.building_id = building;
        series.kind = SeriesKind::OccupantCount;
        series.start = acc.first;
        const int ndays = acc.last - acc.first + 1;
        series.values.resize(static_cast<std::size_t>(ndays) * 24);
        for (int day = 0; day < ndays; ++day) {
            const std::int32_t dd = (acc.first + day).days;
            const auto counts_it = acc.slot_counts.find(dd);
            const auto active_it = acc.active.find(dd);
            for (int h = 0; h < 24; ++h) {
                int sum = 0;
                if (counts_it != acc.slot_counts.end())
                    for (int s = 0; s < kSlotsPerHour; ++s)
                        sum += counts_it->second[h * kSlotsPerHour + s];
                bool any_activity = false;
                if (active_it != acc.active.end())
                    for (int s = 0; s < kSlotsPerHour && !any_activity; ++s)
                        any_activity = active_it->second.test(static_cast<std::size_t>(h * kSlotsPerHour + s));
                const int count = (sum + kSlotsPerHour - 1) / kSlotsPerHour;  // ceil
                series.at(day, h) = {static_cast<double>(count),
                                     any_activity ? Quality::Observed : Quality::ZeroFilled};
            }
        }
        out.push_back(std::move(series));
    }
    return out;
}

/// Hourly demand per building: arithmetic mean of the hour's valid readings;
/// hours without any valid reading are nullified. Duplicate (building,
/// timestamp) readings resolve last-wins.
inline std::vector<HourlySeries> resample_meter(const std::vector<ingest::MeterReading>& readings) {
    struct Cell {
        double sum = 0.0;
        int n = 0;
    };
    struct BuildingAccum {
        Date first, last;
        std::map<DateTime, ingest::MeterReading> dedup;
    };
    std::map<std::string, BuildingAccum> per_building;
    for (const auto& r : readings) {
        auto [it, inserted] = per_building.try_emplace(r.building_id);
        BuildingAccum& acc = it->second;
        if (inserted) {
            acc.first = acc.last = r.timestamp.date;
        } else {
            acc.first = std::min(acc.first, r.timestamp.date);
            acc.last = std::max(acc.last, r.timestamp.date);
        }
        acc.dedup[r.timestamp] = r;  // last-wins
    }

    std::vector<HourlySeries> out;
    for (auto& [building, acc] : per_building) {
        const int ndays = acc.last - acc.first + 1;
        std::vector<Cell> cells(static_cast<std::size_t>(ndays) * 24);
        for (const auto& [ts, r] : acc.dedup) {
            if (!r.valid) continue;
            const std::size_t idx =
                static_cast<std::size_t>(ts.date - acc.first) * 24 + static_cast<std::size_t>(ts.hour());
            cells[idx].sum += r.demand_kw;
            cells[idx].n += 1;
        }
        HourlySeries series;
        series.building_id = building;
        series.kind = SeriesKind::DemandKw;
        series.start = acc.first;
        series.values.resize(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].n > 0)
                series.values[i] = {cells[i].sum / cells[i].n, Quality::Observed};
            else
                series.values[i] = Sample::nullified();
        }
        out.push_back(std::move(series));
    }
    return out;
}

/// Nullify hourly demand above Q3 + factor*IQR of the building's daily peaks.
/// With fewer than four complete days the series is returned unchanged and a
/// warning recorded.
inline HourlySeries iqr_clean(const HourlySeries& series, double factor = 1.5) {
    if (series.kind != SeriesKind::DemandKw) throw DataError("iqr_clean expects a demand series");
    HourlySeries out = series;

    std::vector<double> peaks;
    int complete_days = 0;
    for (int day = 0; day < out.days(); ++day) {
        double peak = -std::numeric_limits<double>::infinity();
        int valid = 0;
        for (int h = 0; h < 24; ++h) {
            const Sample& s = out.at(day, h);
            if (s.valid()) {
                peak = std::max(peak, s.value);
                ++valid;
            }
        }
        if (valid > 0) peaks.push_back(peak);
        if (valid == 24) ++complete_days;
    }
    if (complete_days < 4) {
        out.warnings.push_back("iqr_clean skipped: fewer than 4 complete days");
        return out;
    }

    const double q1 = quantile(peaks, 0.25);
    const double q3 = quantile(peaks, 0.75);
    const double bound = q3 + factor * (q3 - q1);
    for (auto& s : out.values)
        if (s.valid() && s.value > bound) s = Sample::nullified();
    return out;
}

/// Nullify maximal runs of identical consecutive valid values of length >=
/// window. The rule keys on zero hour-to-hour change, not zero value.
inline HourlySeries flatline_clean(const HourlySeries& series, int window = 3) {
    if (series.kind != SeriesKind::DemandKw) throw DataError("flatline_clean expects a demand series");
    HourlySeries out = series;
    const std::size_t n = out.values.size();
    std::size_t i = 0;
    while (i < n) {
        if (!out.values[i].valid()) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && out.values[j].valid() && out.values[j].value == out.values[i].value) ++j;
        if (j - i >= static_cast<std::size_t>(window))
            for (std::size_t k = i; k < j; ++k) out.values[k] = Sample::nullified();
        i = j;
    }
    return out;
}

/// Linearly fill nullified runs of length <= max_gap that have valid samples
/// on both sides; filled samples are flagged Interpolated. Edge gaps and
/// longer runs stay nullified.
inline HourlySeries interpolate_gaps(const HourlySeries& series, int max_gap = 6) {
    HourlySeries out = series;
    const std::size_t n = out.values.size();
    std::size_t i = 0;
    while (i < n) {
        if (out.values[i].valid()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && !out.values[j].valid()) ++j;
        const std::size_t gap = j - i;
        const bool bounded = i > 0 && j < n;
        if (bounded && gap <= static_cast<std::size_t>(max_gap)) {
            const double left = out.values[i - 1].value;
            const double right = out.values[j].value;
            for (std::size_t k = i; k < j; ++k) {
                const double t = static_cast<double>(k - i + 1) / static_cast<double>(gap + 1);
                out.values[k] = {left + t * (right - left), Quality::Interpolated};
            }
        }
        i = j;
    }
    return out;
}

/// Min/max of one normalization scope, kept alongside every normalized
/// profile so savings can return to energy units exactly.
struct NormalizationParams {
    std::string building_id;
    std::string semester;  // "summer", "fall", or "all"
    SeriesKind kind = SeriesKind::DemandKw;
    double min = 0.0;
    double max = 0.0;

    bool degenerate() const { return max <= min; }
};

/// v -> (v - min)/(max - min); a degenerate scope (max == min) maps to zeros.
inline std::vector<double> normalize(const std::vector<double>& values, const NormalizationParams& p) {
    std::vector<double> out(values.size());
    const double range = p.max - p.min;
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = p.degenerate() ? 0.0 : (values[i] - p.min) / range;
    return out;
}

/// Exact inverse of normalize whenever max > min.
inline std::vector<double> denormalize(const std::vector<double>& values, const NormalizationParams& p) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = p.degenerate() ? p.min : values[i] * (p.max - p.min) + p.min;
    return out;
}

/// Compute scope min/max over the valid samples of one series restricted to
/// one semester ("all": the whole series).
inline NormalizationParams compute_params(const HourlySeries& series, Date split, const std::string& semester) {
    NormalizationParams p;
    p.building_id = series.building_id;
    p.semester = semester;
    p.kind = series.kind;
    bool any = false;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!series.values[i].valid()) continue;
        if (semester != "all" &&
            semester_name(semester_of(series.date_of(i), split)) != semester) continue;
        const double v = series.values[i].value;
        if (!any) {
            p.min = p.max = v;
            any = true;
        } else {
            p.min = std::min(p.min, v);
            p.max = std::max(p.max, v);
        }
    }
    return p;
}

// --- cleaned-series CSV (building_id,timestamp,kind,value,quality) ---

inline void write_series_csv(const std::string& path, const std::vector<HourlySeries>& all) {
    csv::Writer w(path, {"building_id", "timestamp", "kind", "value", "quality"});
    const TimestampFormat fmt;
    for (const auto& series : all) {
        for (std::size_t i = 0; i < series.values.size(); ++i) {
            const Sample& s = series.values[i];
            const DateTime ts{series.date_of(i), static_cast<std::int32_t>((i % 24) * 3600)};
            w.row({series.building_id, fmt.format(ts), kind_name(series.kind),
                   s.valid() ? format_double(s.value) : "", quality_name(s.quality)});
        }
    }
}

inline std::vector<HourlySeries> read_series_csv(const std::string& path) {
    csv::Reader reader(path);
    const std::size_t c_b = reader.column("building_id");
    const std::size_t c_ts = reader.column("timestamp");
    const std::size_t c_k = reader.column("kind");
    const std::size_t c_v = reader.column("value");
    const std::size_t c_q = reader.column("quality");
    const TimestampFormat fmt;

    struct RawSample {
        DateTime ts;
        Sample s;
    };
    std::map<std::pair<std::string, std::string>, std::vector<RawSample>> buckets;
    std::vector<std::string> row;
    while (reader.next(row)) {
        const auto ts = fmt.parse(row[c_ts]);
        const auto kind = parse_kind(row[c_k]);
        const auto quality = parse_quality(row[c_q]);
        if (!ts || !kind || !quality) throw DataError("malformed series row in " + path);
        Sample s;
        s.quality = *quality;
        if (*quality != Quality::Nullified) s.value = std::strtod(row[c_v].c_str(), nullptr);
        buckets[{row[c_b], row[c_k]}].push_back({*ts, s});
    }

    std::vector<HourlySeries> out;
    for (auto& [key, samples] : buckets) {
        HourlySeries series;
        series.building_id = key.first;
        series.kind = *parse_kind(key.second);
        Date first = samples.front().ts.date, last = first;
        for (const auto& r : samples) {
            first = std::min(first, r.ts.date);
            last = std::max(last, r.ts.date);
        }
        series.start = first;
        series.values.assign(static_cast<std::size_t>(last - first + 1) * 24, Sample::nullified());
        for (const auto& r : samples)
            series.values[static_cast<std::size_t>(r.ts.date - first) * 24 +
                          static_cast<std::size_t>(r.ts.hour())] = r.s;
        out.push_back(std::move(series));
    }
    return out;
}

}  // namespace martini::preprocess

#endif  // MARTINI_PREPROCESS_HPP
