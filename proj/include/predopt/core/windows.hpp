#pragma once

#include "predopt/core/model.hpp"

#include <vector>

namespace predopt {

/// True when some slot of [start, start + duration) lies outside weekday
/// office hours. Once-off starts are absolute.
inline bool onceoff_after_hours(TimeGrid const& grid, int start, int duration) {
    for (int t = start; t < start + duration; ++t)
        if (!grid.is_office_slot(t)) return true;
    return false;
}

/// Whether an after-hours placement of this once-off can never pay off.
inline bool unprofitable_after_hours(Activity const& a) { return a.value - a.penalty <= 0.0; }

/// Start slots an activity may use. Recurring: first-week starts on a
/// weekday, inside the office window, with at least one occurrence in the
/// grid. Once-off: any start that fits the grid; with `prune`, after-hours
/// starts of activities whose penalty eats the whole value are dropped.
inline std::vector<int> admissible_starts(Instance const& inst, Activity const& a, bool prune = true) {
    auto const& g = inst.grid;
    int T = g.total_slots();
    int spd = g.steps_per_day();
    std::vector<int> out;
    if (a.recurring()) {
        for (int day = 0; day < 5; ++day)
            for (int sod = g.office_start(); sod + a.duration <= g.office_end(); ++sod) {
                int s = day * spd + sod;
                if (g.first_monday_offset() + s + a.duration <= T) out.push_back(s);
            }
        return out;
    }
    bool drop_after_hours = prune && unprofitable_after_hours(a);
    for (int s = 0; s + a.duration <= T; ++s) {
        if (drop_after_hours && onceoff_after_hours(g, s, a.duration)) continue;
        out.push_back(s);
    }
    return out;
}

}  // namespace predopt
