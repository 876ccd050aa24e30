#ifndef MARTINI_SCHEDULE_HPP
#define MARTINI_SCHEDULE_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>

#include "martini/common.hpp"
#include "martini/cluster.hpp"

namespace martini::schedule {

using cluster::Profile;

/// Occupied threshold (normalized density) and thermal-lag hours.
struct ScheduleParams {
    double delta = 0.10;
    int tau = 2;
};

/// Hours are integer bins 0-23 covering [h:00, h+1:00).
struct OccupancySignals {
    std::optional<int> t_a;    // first arrival
    std::optional<int> t_d;    // last departure
    std::optional<int> t_s_o;  // occupant-derived ramp-up
    std::optional<int> t_e_o;  // occupant-derived setback
    bool unoccupied = false;   // never rises above delta
    bool open_ended = false;   // stays above delta through hour 23
};

struct DemandSignals {
    int t_s_e = 0;  // static ramp-up from the demand profile
    int t_e_e = 0;  // static setback
};

struct MissWaste {
    double waste_h = 0.0;  // HVAC operation outside occupancy
    double miss_h = 0.0;   // occupancy outside HVAC operation
};

/// First arrival = earliest hour strictly above delta; last departure = the
/// first later hour strictly below delta. Profiles that never rise above
/// delta are unoccupied; profiles that never drop back are open-ended.
inline OccupancySignals occupied_window(const Profile& centroid, double delta) {
    OccupancySignals sig;
    int t_a = -1;
    for (int h = 0; h < 24; ++h) {
        if (centroid[h] > delta) {
            t_a = h;
            break;
        }
    }
    if (t_a < 0) {
        sig.unoccupied = true;
        return sig;
    }
    sig.t_a = t_a;
    for (int h = t_a + 1; h < 24; ++h) {
        if (centroid[h] < delta) {
            sig.t_d = h;
            return sig;
        }
    }
    sig.open_ended = true;
    return sig;
}

/// Apply the thermal lag: ramp-up at t_a - tau; setback at t_d + sign * tau,
/// both clamped to the day. The published signal tables use sign = -1
/// (setback tau before departure); sign = +1 is the literal lag equation.
inline OccupancySignals hvac_window(OccupancySignals sig, int tau, int evening_sign = -1) {
    if (sig.t_a) sig.t_s_o = std::max(*sig.t_a - tau, 0);
    if (sig.t_d) sig.t_e_o = std::clamp(*sig.t_d + evening_sign * tau, 0, 23);
    return sig;
}

/// Static schedule from a demand profile: diff[h] = value[h] - value[h+1];
/// ramp-up at the largest demand rise (most negative diff), setback at the
/// largest drop, earliest hour on ties. Profiles whose rise does not precede
/// the drop have no detectable schedule.
inline std::optional<DemandSignals> demand_signals(const Profile& centroid) {
    int t_s_e = 0, t_e_e = 0;
    double min_diff = std::numeric_limits<double>::infinity();
    double max_diff = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < 23; ++h) {
        const double diff = centroid[h] - centroid[h + 1];
        if (diff < min_diff) {
            min_diff = diff;
            t_s_e = h;
        }
        if (diff > max_diff) {
            max_diff = diff;
            t_e_e = h;
        }
    }
    if (t_s_e >= t_e_e) return std::nullopt;
    return DemandSignals{t_s_e, t_e_e};
}

/// Waste hours: static operation outside the occupant-derived window.
/// Miss hours: occupant-derived window outside static operation.
/// An unoccupied day makes the whole static window waste; an open-ended
/// evening counts the hours from t_e_e to end of day as miss.
inline MissWaste miss_waste(const OccupancySignals& occ, const DemandSignals& dem) {
    MissWaste mw;
    if (occ.unoccupied) {
        mw.waste_h = static_cast<double>(dem.t_e_e - dem.t_s_e);
        return mw;
    }
    if (occ.t_s_o) {
        mw.waste_h += std::max(0, *occ.t_s_o - dem.t_s_e);
        mw.miss_h += std::max(0, dem.t_s_e - *occ.t_s_o);
    }
    if (occ.t_e_o) {
        mw.waste_h += std::max(0, dem.t_e_e - *occ.t_e_o);
        mw.miss_h += std::max(0, *occ.t_e_o - dem.t_e_e);
    } else if (occ.open_ended) {
        mw.miss_h += std::max(0, 23 - dem.t_e_e);
    }
    return mw;
}

}  // namespace martini::schedule

#endif  // MARTINI_SCHEDULE_HPP
