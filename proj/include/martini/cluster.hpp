#ifndef MARTINI_CLUSTER_HPP
#define MARTINI_CLUSTER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "martini/common.hpp"
#include "martini/preprocess.hpp"
#include "martini/timeutil.hpp"

namespace martini::cluster {

using Profile = std::array<double, 24>;

inline double sq_dist(const Profile& a, const Profile& b) {
    double acc = 0.0;
    for (int i = 0; i < 24; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

struct ProfileRow {
    std::string building_id;
    Date date;
    Profile values{};
};

/// n x 24 matrix of normalized daily profiles for one (kind, semester) data set.
struct DailyProfileMatrix {
    std::vector<ProfileRow> rows;
    preprocess::SeriesKind kind = preprocess::SeriesKind::DemandKw;
    Semester semester = Semester::Summer;
    std::map<std::string, preprocess::NormalizationParams> norm_params;  // per building
};

/// One row per complete day in the semester, normalized with the building's
/// scope params. Days with any nullified hour are excluded; the split date
/// belongs to the later semester.
inline DailyProfileMatrix build_profile_matrix(
    const std::vector<preprocess::HourlySeries>& all, Date split, Semester semester,
    preprocess::SeriesKind kind,
    const std::map<std::string, preprocess::NormalizationParams>& params) {
    DailyProfileMatrix m;
    m.kind = kind;
    m.semester = semester;
    for (const auto& series : all) {
        if (series.kind != kind) continue;
        const auto pit = params.find(series.building_id);
        if (pit == params.end())
            throw DataError("missing normalization params for building " + series.building_id);
        bool used = false;
        for (int day = 0; day < series.days(); ++day) {
            const Date d = series.start + day;
            if (semester_of(d, split) != semester) continue;
            const auto raw = series.complete_day(day);
            if (!raw) continue;
            ProfileRow row;
            row.building_id = series.building_id;
            row.date = d;
            const auto norm = preprocess::normalize({raw->begin(), raw->end()}, pit->second);
            std::copy(norm.begin(), norm.end(), row.values.begin());
            m.rows.push_back(std::move(row));
            used = true;
        }
        if (used) m.norm_params[series.building_id] = pit->second;
    }
    return m;
}

struct ClusterModel {
    int k = 0;
    std::vector<Profile> centroids;
    std::vector<int> assignments;  // row index -> cluster label
    double wss = 0.0;
    std::uint64_t seed = 0;
    int restarts = 0;
};

/// Eq-style within-cluster sum of squared distances to centroids.
inline double wss(const ClusterModel& model, const DailyProfileMatrix& matrix) {
    if (model.assignments.size() != matrix.rows.size())
        throw DataError("wss: model/matrix size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        const int c = model.assignments[i];
        if (c < 0 || c >= static_cast<int>(model.centroids.size()))
            throw DataError("wss: assignment out of range");
        acc += sq_dist(matrix.rows[i].values, model.centroids[static_cast<std::size_t>(c)]);
    }
    return acc;
}

namespace detail {

inline int nearest_centroid(const Profile& p, const std::vector<Profile>& centroids) {
    int best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
        const double d = sq_dist(p, centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {  // ties keep the lowest index
            best_d = d;
            best = c;
        }
    }
    return best;
}

/// Greedy farthest-point seeding from a seeded first pick.
inline std::vector<Profile> maximin_seed(const std::vector<ProfileRow>& rows, int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = rows.size();
    std::vector<bool> chosen(n, false);
    std::vector<Profile> centroids;
    const std::size_t first = static_cast<std::size_t>(rng() % n);
    centroids.push_back(rows[first].values);
    chosen[first] = true;
    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centroids.size()) < k) {
        for (std::size_t i = 0; i < n; ++i)
            if (!chosen[i]) min_d[i] = std::min(min_d[i], sq_dist(rows[i].values, centroids.back()));
        std::size_t pick = n;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            if (min_d[i] > best) {
                best = min_d[i];
                pick = i;
            }
        }
        centroids.push_back(rows[pick].values);
        chosen[pick] = true;
    }
    return centroids;
}

struct LloydResult {
    std::vector<Profile> centroids;
    std::vector<int> assignments;
    double wss = 0.0;
};

/// Assignment pass (ties to the lowest centroid index) followed by re-seeding
/// of empty clusters: each empty cluster takes the point farthest from its
/// current centroid, drawn from clusters that stay non-empty.
inline bool assign_and_repair(const std::vector<ProfileRow>& rows, std::vector<Profile>& centroids,
                              std::vector<int>& assign) {
    const std::size_t n = rows.size();
    const int k = static_cast<int>(centroids.size());
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const int c = nearest_centroid(rows[i].values, centroids);
        if (c != assign[i]) {
            assign[i] = c;
            changed = true;
        }
    }
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int c : assign) ++sizes[static_cast<std::size_t>(c)];
    for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > 0) continue;
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (sizes[static_cast<std::size_t>(assign[i])] <= 1) continue;  // keep donors non-empty
            const double d = sq_dist(rows[i].values, centroids[static_cast<std::size_t>(assign[i])]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        centroids[static_cast<std::size_t>(c)] = rows[far].values;
        --sizes[static_cast<std::size_t>(assign[far])];
        assign[far] = c;
        ++sizes[static_cast<std::size_t>(c)];
        changed = true;
    }
    return changed;
}

inline LloydResult lloyd(const DailyProfileMatrix& matrix, int k, std::uint64_t seed, int max_iters = 300) {
    const auto& rows = matrix.rows;
    const std::size_t n = rows.size();
    std::vector<Profile> centroids = maximin_seed(rows, k, seed);
    std::vector<int> assign(n, -1);
    double prev_wss = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iters; ++iter) {
        const bool changed = assign_and_repair(rows, centroids, assign);
        if (!changed) break;  // assignment fixpoint; centroids already at means

        // Update step: centroids at cluster means.
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        std::vector<Profile> sums(static_cast<std::size_t>(k), Profile{});
        for (std::size_t i = 0; i < n; ++i) {
            ++sizes[static_cast<std::size_t>(assign[i])];
            auto& s = sums[static_cast<std::size_t>(assign[i])];
            for (int d = 0; d < 24; ++d) s[d] += rows[i].values[d];
        }
        for (int c = 0; c < k; ++c)
            for (int d = 0; d < 24; ++d)
                centroids[static_cast<std::size_t>(c)][d] =
                    sums[static_cast<std::size_t>(c)][d] / sizes[static_cast<std::size_t>(c)];

        double cur = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            cur += sq_dist(rows[i].values, centroids[static_cast<std::size_t>(assign[i])]);
        if (cur > prev_wss + 1e-9)
            throw std::logic_error("kmeans: WSS increased across an iteration");
        if (prev_wss - cur < 1e-10) {
            prev_wss = cur;
            break;
        }
        prev_wss = cur;
    }
    assign_and_repair(rows, centroids, assign);  // settle against final centroids

    LloydResult res;
    res.centroids = std::move(centroids);
    res.assignments = std::move(assign);
    res.wss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        res.wss += sq_dist(rows[i].values, res.centroids[static_cast<std::size_t>(res.assignments[i])]);
    return res;
}

}  // namespace detail

/// Best-of-restarts Lloyd clustering; deterministic for a given
/// (matrix, k, restarts, seed). Labels are ordered by descending centroid
/// peak so label 0 is the highest-peak profile.
inline ClusterModel kmeans(const DailyProfileMatrix& matrix, int k, int restarts, std::uint64_t seed) {
    const std::size_t n = matrix.rows.size();
    if (k < 1) throw DataError("kmeans: k must be positive");
    if (n < static_cast<std::size_t>(k))
        throw DataError("kmeans: fewer rows (" + std::to_string(n) + ") than clusters (" + std::to_string(k) + ")");

    detail::LloydResult best;
    best.wss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        const auto res = detail::lloyd(matrix, k, seed + static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ull);
        if (res.wss < best.wss) best = res;  // ties keep the lowest restart index
    }

    // Relabel by descending centroid peak value.
    std::vector<int> order(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) order[static_cast<std::size_t>(c)] = c;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double pa = *std::max_element(best.centroids[static_cast<std::size_t>(a)].begin(),
                                            best.centroids[static_cast<std::size_t>(a)].end());
        const double pb = *std::max_element(best.centroids[static_cast<std::size_t>(b)].begin(),
                                            best.centroids[static_cast<std::size_t>(b)].end());
        return pa > pb;
    });
    std::vector<int> relabel(static_cast<std::size_t>(k));
    for (int newc = 0; newc < k; ++newc) relabel[static_cast<std::size_t>(order[static_cast<std::size_t>(newc)])] = newc;

    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.restarts = restarts;
    model.centroids.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c)
        model.centroids[static_cast<std::size_t>(relabel[static_cast<std::size_t>(c)])] =
            best.centroids[static_cast<std::size_t>(c)];
    model.assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        model.assignments[i] = relabel[static_cast<std::size_t>(best.assignments[i])];
    model.wss = best.wss;
    return model;
}

struct SelectKResult {
    int k = 0;
    std::vector<std::string> violations;  // monotonicity complaints, if any
};

/// Elbow selection: the interior k maximizing the discrete second difference
/// of the WSS curve; ties break toward the smallest k.
inline SelectKResult select_k(const std::map<int, double>& curve) {
    if (curve.size() < 3) throw DataError("select_k: need at least 3 curve points");
    int prev_k = curve.begin()->first - 1;
    for (const auto& [k, _] : curve) {
        if (k != prev_k + 1) throw DataError("select_k: curve must cover a contiguous k range");
        prev_k = k;
    }
    SelectKResult res;
    for (auto it = std::next(curve.begin()); it != curve.end(); ++it)
        if (it->second > std::prev(it)->second + 1e-12)
            res.violations.push_back("WSS increased from k=" + std::to_string(std::prev(it)->first) +
                                     " to k=" + std::to_string(it->first));
    double best = -std::numeric_limits<double>::infinity();
    for (auto it = std::next(curve.begin()); std::next(it) != curve.end(); ++it) {
        const double second_diff = std::prev(it)->second - 2.0 * it->second + std::next(it)->second;
        if (second_diff > best) {  // strict: ties keep the smallest k
            best = second_diff;
            res.k = it->first;
        }
    }
    return res;
}

struct CalendarEntry {
    std::string building_id;
    Date date;
    int label = 0;
};

/// Per-building per-day profile labels for one (kind, semester) data set.
struct ClusterCalendar {
    preprocess::SeriesKind kind = preprocess::SeriesKind::DemandKw;
    Semester semester = Semester::Summer;
    Date split;
    std::vector<CalendarEntry> entries;
};

inline ClusterCalendar assign_calendar(const ClusterModel& model, const DailyProfileMatrix& matrix,
                                       Date split) {
    ClusterCalendar cal;
    cal.kind = matrix.kind;
    cal.semester = matrix.semester;
    cal.split = split;
    cal.entries.reserve(matrix.rows.size());
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        const int label = detail::nearest_centroid(matrix.rows[i].values, model.centroids);
        cal.entries.push_back({matrix.rows[i].building_id, matrix.rows[i].date, label});
    }
    return cal;
}

struct ScheduleTableRow {
    std::string building_id;
    Semester semester = Semester::Summer;
    DayGroup group = DayGroup::MonThu;
    int label = 0;
};

struct ScheduleTable {
    std::vector<ScheduleTableRow> rows;
    std::vector<std::string> warnings;

    const ScheduleTableRow* find(const std::string& building, Semester sem, DayGroup g) const {
        for (const auto& r : rows)
            if (r.building_id == building && r.semester == sem && r.group == g) return &r;
        return nullptr;
    }
};

/// Mode profile per (building, day group) for the calendar's semester;
/// ties break toward the lower label.
inline ScheduleTable mode_schedule_table(const ClusterCalendar& calendar) {
    std::map<std::pair<std::string, DayGroup>, std::map<int, int>> counts;
    for (const auto& e : calendar.entries) ++counts[{e.building_id, day_group(e.date)}][e.label];

    std::map<std::string, bool> buildings;
    for (const auto& e : calendar.entries) buildings[e.building_id] = true;

    ScheduleTable table;
    for (const auto& [building, _] : buildings) {
        for (DayGroup g : {DayGroup::MonThu, DayGroup::Fri, DayGroup::SatSun}) {
            auto it = counts.find({building, g});
            if (it == counts.end() || it->second.empty()) {
                table.warnings.push_back("no days for " + building + " " + day_group_name(g) + " " +
                                         semester_name(calendar.semester) + "; row omitted");
                continue;
            }
            int best_label = -1, best_count = -1;
            for (const auto& [label, cnt] : it->second) {
                if (cnt > best_count) {  // map iterates labels ascending: ties keep lower label
                    best_count = cnt;
                    best_label = label;
                }
            }
            table.rows.push_back({building, calendar.semester, g, best_label});
        }
    }
    return table;
}

}  // namespace martini::cluster

#endif  // MARTINI_CLUSTER_HPP
