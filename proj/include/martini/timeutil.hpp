#ifndef MARTINI_TIMEUTIL_HPP
#define MARTINI_TIMEUTIL_HPP

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>

#include "martini/common.hpp"

namespace martini {

/// Calendar date as days since 1970-01-01, wall-clock semantics (no zone, no DST).
struct Date {
    std::int32_t days = 0;

    static Date from_ymd(int y, int m, int d) {
        using namespace std::chrono;
        const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) throw DataError("invalid calendar date");
        return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
    }

    void to_ymd(int& y, int& m, int& d) const {
        using namespace std::chrono;
        const year_month_day ymd{sys_days{std::chrono::days{days}}};
        y = static_cast<int>(ymd.year());
        m = static_cast<int>(static_cast<unsigned>(ymd.month()));
        d = static_cast<int>(static_cast<unsigned>(ymd.day()));
    }

    /// 0 = Monday ... 6 = Sunday.
    int weekday() const {
        using namespace std::chrono;
        const std::chrono::weekday wd{sys_days{std::chrono::days{days}}};
        return static_cast<int>(wd.iso_encoding()) - 1;
    }

    bool is_weekend() const { return weekday() >= 5; }

    std::string to_string() const {
        int y, m, d;
        to_ymd(y, m, d);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
        return buf;
    }

    static std::optional<Date> parse(const std::string& s) {
        int y, m, d;
        char c;
        if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &c) != 3) return std::nullopt;
        if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
        using namespace std::chrono;
        const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) return std::nullopt;
        return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
    }

    Date operator+(int n) const { return Date{days + n}; }
    Date operator-(int n) const { return Date{days - n}; }
    int operator-(Date o) const { return days - o.days; }
    auto operator<=>(const Date&) const = default;
};

/// Local wall-clock timestamp with second precision.
struct DateTime {
    Date date;
    std::int32_t sec_of_day = 0;  // [0, 86400)

    int hour() const { return sec_of_day / 3600; }
    int minute_of_day() const { return sec_of_day / 60; }
    /// Five-minute slot within the day, [0, 288).
    int slot() const { return sec_of_day / 300; }

    auto operator<=>(const DateTime&) const = default;
};

enum class DayGroup { MonThu, Fri, SatSun };

inline DayGroup day_group(Date d) {
    const int wd = d.weekday();
    if (wd <= 3) return DayGroup::MonThu;
    if (wd == 4) return DayGroup::Fri;
    return DayGroup::SatSun;
}

inline const char* day_group_name(DayGroup g) {
    switch (g) {
        case DayGroup::MonThu: return "Mon-Thu";
        case DayGroup::Fri: return "Fri";
        default: return "Sat-Sun";
    }
}

inline std::optional<DayGroup> parse_day_group(const std::string& s) {
    if (s == "Mon-Thu") return DayGroup::MonThu;
    if (s == "Fri") return DayGroup::Fri;
    if (s == "Sat-Sun") return DayGroup::SatSun;
    return std::nullopt;
}

enum class Semester { Summer, Fall };

/// The split date itself belongs to the later (fall) semester.
inline Semester semester_of(Date d, Date split) { return d < split ? Semester::Summer : Semester::Fall; }

inline const char* semester_name(Semester s) { return s == Semester::Summer ? "summer" : "fall"; }

inline std::optional<Semester> parse_semester(const std::string& s) {
    if (s == "summer") return Semester::Summer;
    if (s == "fall") return Semester::Fall;
    return std::nullopt;
}

/// Timestamp parser for strptime-like formats built from %Y %m %d %H %M %S
/// and literal separators. The canonical format is "%Y-%m-%d %H:%M:%S".
class TimestampFormat {
public:
    explicit TimestampFormat(std::string fmt = "%Y-%m-%d %H:%M:%S") : fmt_(std::move(fmt)) {
        bool has_date = fmt_.find("%Y") != std::string::npos && fmt_.find("%m") != std::string::npos &&
                        fmt_.find("%d") != std::string::npos;
        if (!has_date) throw ConfigError("timestamp_format must contain %Y, %m and %d: " + fmt_);
    }

    const std::string& pattern() const { return fmt_; }

    std::optional<DateTime> parse(const std::string& text) const {
        int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
        std::size_t ti = 0;
        for (std::size_t fi = 0; fi < fmt_.size(); ++fi) {
            if (fmt_[fi] == '%' && fi + 1 < fmt_.size()) {
                const char code = fmt_[++fi];
                int width = (code == 'Y') ? 4 : 2;
                int val = 0;
                int got = 0;
                while (got < width && ti < text.size() && text[ti] >= '0' && text[ti] <= '9') {
                    val = val * 10 + (text[ti] - '0');
                    ++ti;
                    ++got;
                }
                if (got == 0) return std::nullopt;
                switch (code) {
                    case 'Y': y = val; break;
                    case 'm': mo = val; break;
                    case 'd': d = val; break;
                    case 'H': h = val; break;
                    case 'M': mi = val; break;
                    case 'S': se = val; break;
                    default: return std::nullopt;
                }
            } else {
                if (ti >= text.size() || text[ti] != fmt_[fi]) return std::nullopt;
                ++ti;
            }
        }
        if (ti != text.size()) return std::nullopt;
        if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 59) return std::nullopt;
        using namespace std::chrono;
        const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) return std::nullopt;
        const auto days = static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count());
        return DateTime{Date{days}, h * 3600 + mi * 60 + se};
    }

    std::string format(const DateTime& dt) const {
        int y, mo, d;
        dt.date.to_ymd(y, mo, d);
        std::string out;
        out.reserve(fmt_.size() + 8);
        for (std::size_t fi = 0; fi < fmt_.size(); ++fi) {
            if (fmt_[fi] == '%' && fi + 1 < fmt_.size()) {
                char buf[8];
                switch (fmt_[++fi]) {
                    case 'Y': std::snprintf(buf, sizeof(buf), "%04d", y); break;
                    case 'm': std::snprintf(buf, sizeof(buf), "%02d", mo); break;
                    case 'd': std::snprintf(buf, sizeof(buf), "%02d", d); break;
                    case 'H': std::snprintf(buf, sizeof(buf), "%02d", dt.sec_of_day / 3600); break;
                    case 'M': std::snprintf(buf, sizeof(buf), "%02d", (dt.sec_of_day / 60) % 60); break;
                    case 'S': std::snprintf(buf, sizeof(buf), "%02d", dt.sec_of_day % 60); break;
                    default: buf[0] = fmt_[fi]; buf[1] = '\0';
                }
                out += buf;
            } else {
                out += fmt_[fi];
            }
        }
        return out;
    }

private:
    std::string fmt_;
};

/// "HH:00" rendering for hour-of-day signal times; nullopt renders as "-".
inline std::string hour_label(std::optional<int> h) {
    if (!h) return "-";
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d:00", *h);
    return buf;
}

}  // namespace martini

#endif  // MARTINI_TIMEUTIL_HPP
