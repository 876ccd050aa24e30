#ifndef MARTINI_SAVINGS_HPP
#define MARTINI_SAVINGS_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "martini/cluster.hpp"
#include "martini/common.hpp"
#include "martini/preprocess.hpp"
#include "martini/schedule.hpp"
#include "martini/timeutil.hpp"

namespace martini::savings {

using DayProfile = std::array<double, 24>;

/// Occupant-derived window the HVAC operation is realigned to.
struct TargetWindow {
    std::optional<int> t_s_o;
    std::optional<int> t_e_o;
    bool unoccupied = false;

    static TargetWindow from_signals(const schedule::OccupancySignals& sig) {
        return {sig.t_s_o, sig.t_e_o, sig.unoccupied};
    }
};

/// Actual profile plus its realigned counterpart. The virtual profile equals
/// the base outside the recorded morning/evening windows.
struct VirtualProfile {
    DayProfile base{};
    DayProfile virt{};
    std::optional<std::pair<int, int>> morning_window;  // inclusive modified hours
    std::optional<std::pair<int, int>> evening_window;
    double level_morning = 0.0;  // pre-ramp demand L_m
    double level_evening = 0.0;  // post-setback demand L_e
};

/// Translate the demand profile from the static to the target window holding
/// pre-ramp / post-setback demand constant over the shifted span. Later
/// ramp-up and earlier setback produce savings; the opposite shifts hold the
/// first/last operating-hour level and produce extra demand. Days whose
/// target windows overlap inversely (t_s_o > t_e_o) are not constructible.
inline std::optional<VirtualProfile> virtual_profile(const DayProfile& base,
                                                     const schedule::DemandSignals& dem,
                                                     const TargetWindow& target) {
    if (!target.unoccupied && target.t_s_o && target.t_e_o && *target.t_s_o > *target.t_e_o)
        return std::nullopt;

    VirtualProfile vp;
    vp.base = base;
    vp.virt = base;
    vp.level_morning = base[dem.t_s_e];
    vp.level_evening = base[std::min(dem.t_e_e + 1, 23)];

    if (target.unoccupied) {
        if (dem.t_s_e + 1 <= dem.t_e_e) {
            for (int h = dem.t_s_e + 1; h <= dem.t_e_e; ++h) vp.virt[h] = vp.level_morning;
            vp.morning_window = {dem.t_s_e + 1, dem.t_e_e};
        }
        return vp;
    }

    if (target.t_s_o) {
        const int t = *target.t_s_o;
        if (t > dem.t_s_e) {  // delayed ramp-up: hold pre-ramp level
            for (int h = dem.t_s_e + 1; h <= t; ++h) vp.virt[h] = vp.level_morning;
            vp.morning_window = {dem.t_s_e + 1, t};
        } else if (t < dem.t_s_e) {  // earlier ramp-up: hold first operating level
            const double level = base[dem.t_s_e + 1];
            for (int h = t + 1; h <= dem.t_s_e; ++h) vp.virt[h] = level;
            vp.morning_window = {t + 1, dem.t_s_e};
        }
    }

    if (target.t_e_o) {
        const int t = *target.t_e_o;
        if (t < dem.t_e_e) {  // earlier setback: hold post-setback level
            for (int h = t + 1; h <= dem.t_e_e; ++h) vp.virt[h] = vp.level_evening;
            vp.evening_window = {t + 1, dem.t_e_e};
        } else if (t > dem.t_e_e) {  // later setback: hold last operating level
            const double level = base[dem.t_e_e];
            for (int h = dem.t_e_e + 1; h <= t; ++h) vp.virt[h] = level;
            vp.evening_window = {dem.t_e_e + 1, t};
        }
    }
    return vp;
}

/// Integrated actual-minus-virtual demand over the day, in kWh (1 h bins).
/// Negative when the realignment adds demand.
inline double daily_savings(const VirtualProfile& vp) {
    double acc = 0.0;
    for (int h = 0; h < 24; ++h) acc += vp.base[h] - vp.virt[h];
    return acc;
}

struct LedgerEntry {
    std::string building_id;
    Date date;
    int label_demand = 0;
    std::optional<int> label_occupancy;
    double savings_kwh = 0.0;
};

struct Rollup {
    double total_kwh = 0.0;
    double baseline_kwh = 0.0;
    std::array<double, 168> by_hour_of_week{};  // Monday 00:00 first
    std::vector<std::pair<Date, double>> by_day;

    double pct() const { return baseline_kwh > 0.0 ? 100.0 * total_kwh / baseline_kwh : 0.0; }
};

struct SavingsLedger {
    double delta = 0.0;
    int tau = 0;
    std::string mode;
    std::vector<LedgerEntry> entries;                       // ordered by (building, date)
    std::map<std::pair<std::string, Semester>, Rollup> rollups;
    std::vector<std::string> skipped;                       // skipped days with reasons
};

/// Everything stage five consumes, already split per semester.
struct SavingsInputs {
    std::map<Semester, cluster::ClusterModel> demand_models;
    std::map<Semester, cluster::ClusterCalendar> demand_calendars;
    std::map<Semester, cluster::ClusterModel> occupancy_models;
    cluster::ScheduleTable schedule_table;  // occupancy day-group labels, both semesters
    std::map<std::pair<std::string, Semester>, preprocess::NormalizationParams> demand_params;
    const std::vector<preprocess::HourlySeries>* demand_series = nullptr;  // "actual" mode source
    std::string mode = "centroid";
};

namespace detail {

inline DayProfile denormalized_centroid(const cluster::ClusterModel& model, int label,
                                        const preprocess::NormalizationParams& params) {
    const auto& c = model.centroids.at(static_cast<std::size_t>(label));
    const auto raw = preprocess::denormalize({c.begin(), c.end()}, params);
    DayProfile out{};
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

inline std::optional<DayProfile> base_profile(const SavingsInputs& in, const std::string& building,
                                              Semester sem, Date date, int demand_label) {
    if (in.mode == "actual") {
        if (!in.demand_series) return std::nullopt;
        for (const auto& series : *in.demand_series) {
            if (series.building_id != building || series.kind != preprocess::SeriesKind::DemandKw) continue;
            const int day = date - series.start;
            if (day < 0 || day >= series.days()) return std::nullopt;
            const auto raw = series.complete_day(day);
            if (!raw) return std::nullopt;
            DayProfile out{};
            std::copy(raw->begin(), raw->end(), out.begin());
            return out;
        }
        return std::nullopt;
    }
    const auto pit = in.demand_params.find({building, sem});
    if (pit == in.demand_params.end()) return std::nullopt;
    return denormalized_centroid(in.demand_models.at(sem), demand_label, pit->second);
}

/// Demand signals per cluster label, evaluated once per model.
inline std::map<int, std::optional<schedule::DemandSignals>> signals_per_label(
    const cluster::ClusterModel& model) {
    std::map<int, std::optional<schedule::DemandSignals>> out;
    for (int label = 0; label < model.k; ++label)
        out[label] = schedule::demand_signals(model.centroids[static_cast<std::size_t>(label)]);
    return out;
}

}  // namespace detail

/// Walk the demand calendar day by day, realign each day's profile to the
/// occupant-derived window of its day group, and integrate the savings.
inline SavingsLedger aggregate_savings(const SavingsInputs& in, const schedule::ScheduleParams& params,
                                       int evening_sign = -1) {
    SavingsLedger ledger;
    ledger.delta = params.delta;
    ledger.tau = params.tau;
    ledger.mode = in.mode;

    for (const auto& [sem, calendar] : in.demand_calendars) {
        const auto dem_signals = detail::signals_per_label(in.demand_models.at(sem));

        const auto occ_it = in.occupancy_models.find(sem);
        std::map<int, schedule::OccupancySignals> occ_signals;
        if (occ_it != in.occupancy_models.end()) {
            for (int label = 0; label < occ_it->second.k; ++label) {
                const auto& centroid = occ_it->second.centroids[static_cast<std::size_t>(label)];
                occ_signals[label] =
                    schedule::hvac_window(schedule::occupied_window(centroid, params.delta),
                                          params.tau, evening_sign);
            }
        }

        for (const auto& entry : calendar.entries) {
            const auto& dsig = dem_signals.at(entry.label);
            if (!dsig) {
                ledger.skipped.push_back(entry.building_id + " " + entry.date.to_string() +
                                         ": no detectable ramp in demand profile " +
                                         std::to_string(entry.label + 1));
                continue;
            }
            const auto* srow = in.schedule_table.find(entry.building_id, sem, day_group(entry.date));
            if (!srow) {
                ledger.skipped.push_back(entry.building_id + " " + entry.date.to_string() +
                                         ": no occupancy schedule for day group");
                continue;
            }
            const auto oit = occ_signals.find(srow->label);
            if (oit == occ_signals.end()) {
                ledger.skipped.push_back(entry.building_id + " " + entry.date.to_string() +
                                         ": no occupancy signals for profile " +
                                         std::to_string(srow->label + 1));
                continue;
            }
            const auto base = detail::base_profile(in, entry.building_id, sem, entry.date, entry.label);
            if (!base) {
                ledger.skipped.push_back(entry.building_id + " " + entry.date.to_string() +
                                         ": no base demand profile");
                continue;
            }
            const auto vp = virtual_profile(*base, *dsig, TargetWindow::from_signals(oit->second));
            if (!vp) {
                ledger.skipped.push_back(entry.building_id + " " + entry.date.to_string() +
                                         ": overlapping morning/evening windows");
                continue;
            }
            const double kwh = daily_savings(*vp);
            ledger.entries.push_back({entry.building_id, entry.date, entry.label, srow->label, kwh});

            Rollup& roll = ledger.rollups[{entry.building_id, sem}];
            roll.total_kwh += kwh;
            roll.by_day.emplace_back(entry.date, kwh);
            const int wd = entry.date.weekday();
            for (int h = 0; h < 24; ++h) {
                roll.baseline_kwh += vp->base[h];
                roll.by_hour_of_week[wd * 24 + h] += vp->base[h] - vp->virt[h];
            }
        }
    }

    std::sort(ledger.entries.begin(), ledger.entries.end(), [](const LedgerEntry& a, const LedgerEntry& b) {
        if (a.building_id != b.building_id) return a.building_id < b.building_id;
        return a.date < b.date;
    });
    for (auto& [key, roll] : ledger.rollups)
        std::sort(roll.by_day.begin(), roll.by_day.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    return ledger;
}

struct SweepCell {
    int shift_morning = 0;
    int shift_evening = 0;
    std::map<std::string, double> pct_by_building;
};

struct SweepResult {
    std::vector<SweepCell> cells;                      // grid order: morning asc, evening desc
    std::map<std::string, double> max_pct_by_building;
    std::map<std::string, int> histogram;              // of per-building maxima
};

/// Demand-only savings sweep: realign every day's profile to the static
/// window shifted by (a, b). Cell (0, 0) is exactly zero by construction.
inline SweepResult sensitivity_sweep(const SavingsInputs& in, const std::vector<int>& morning_shifts,
                                     const std::vector<int>& evening_shifts) {
    SweepResult result;
    for (int a : morning_shifts) {
        for (int b : evening_shifts) {
            SweepCell cell;
            cell.shift_morning = a;
            cell.shift_evening = b;
            std::map<std::string, std::pair<double, double>> acc;  // building -> (savings, baseline)
            for (const auto& [sem, calendar] : in.demand_calendars) {
                const auto dem_signals = detail::signals_per_label(in.demand_models.at(sem));
                for (const auto& entry : calendar.entries) {
                    const auto& dsig = dem_signals.at(entry.label);
                    if (!dsig) continue;
                    TargetWindow target;
                    target.t_s_o = std::clamp(dsig->t_s_e + a, 0, 23);
                    target.t_e_o = std::clamp(dsig->t_e_e + b, 0, 23);
                    const auto base = detail::base_profile(in, entry.building_id, sem, entry.date, entry.label);
                    if (!base) continue;
                    const auto vp = virtual_profile(*base, *dsig, target);
                    if (!vp) continue;
                    auto& [saved, baseline] = acc[entry.building_id];
                    saved += daily_savings(*vp);
                    for (int h = 0; h < 24; ++h) baseline += vp->base[h];
                }
            }
            for (const auto& [building, sums] : acc)
                cell.pct_by_building[building] =
                    sums.second > 0.0 ? 100.0 * sums.first / sums.second : 0.0;
            result.cells.push_back(std::move(cell));
        }
    }

    for (const auto& cell : result.cells)
        for (const auto& [building, pct] : cell.pct_by_building) {
            auto it = result.max_pct_by_building.find(building);
            if (it == result.max_pct_by_building.end() || pct > it->second)
                result.max_pct_by_building[building] = pct;
        }
    for (const auto& [building, pct] : result.max_pct_by_building) {
        const char* bucket = pct >= 4.0 ? ">=4%" : pct >= 2.0 ? "2-4%" : pct >= 1.0 ? "1-2%" : "<1%";
        ++result.histogram[bucket];
    }
    return result;
}

}  // namespace martini::savings

#endif  // MARTINI_SAVINGS_HPP
