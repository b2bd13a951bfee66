#pragma once

#include "predopt/core/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace predopt {

enum class ActivityKind { recurring, once_off };

struct Activity {
    int id = 0;
    ActivityKind kind = ActivityKind::recurring;
    int duration = 1;      // slots
    int small_rooms = 0;
    int large_rooms = 0;
    double power = 0.0;    // kW per room
    double value = 0.0;    // $, once-off only
    double penalty = 0.0;  // $, once-off only
    std::vector<int> prerequisites;

    bool recurring() const { return kind == ActivityKind::recurring; }
    int rooms() const { return small_rooms + large_rooms; }
    double load() const { return power * rooms(); }  // kW while in progress

    friend bool operator==(Activity const&, Activity const&) = default;
};

struct Battery {
    double capacity = 0.0;    // kWh
    double initial = 0.0;     // kWh
    double max_power = 0.0;   // kW
    double efficiency = 1.0;  // round trip, (0, 1]

    double step_energy() const { return TimeGrid::kHoursPerSlot * max_power; }
    double charge_draw() const { return max_power / std::sqrt(efficiency); }
    double discharge_supply() const { return max_power * std::sqrt(efficiency); }

    friend bool operator==(Battery const&, Battery const&) = default;
};

struct Building {
    int id = 0;
    int small_rooms = 0;
    int large_rooms = 0;
    std::string base_load_series;
    std::string solar_series;

    friend bool operator==(Building const&, Building const&) = default;
};

/// One scheduling problem. Activity, building and battery ids are dense and
/// equal to their position in the respective list.
struct Instance {
    TimeGrid grid;
    std::vector<Building> buildings;
    std::vector<Activity> activities;
    std::vector<Battery> batteries;
    std::vector<double> price;          // $/MWh per slot
    std::vector<double> net_base_load;  // kW per slot, base load minus solar

    int total_small_rooms() const {
        return std::accumulate(buildings.begin(), buildings.end(), 0,
                               [](int acc, Building const& b) { return acc + b.small_rooms; });
    }
    int total_large_rooms() const {
        return std::accumulate(buildings.begin(), buildings.end(), 0,
                               [](int acc, Building const& b) { return acc + b.large_rooms; });
    }

    std::vector<int> ids_of(ActivityKind kind) const {
        std::vector<int> out;
        for (auto const& a : activities)
            if (a.kind == kind) out.push_back(a.id);
        return out;
    }

    friend bool operator==(Instance const&, Instance const&) = default;
};

/// Throws std::invalid_argument naming the first broken invariant.
inline void validate(Instance const& inst) {
    auto fail = [](std::string const& msg) { throw std::invalid_argument("invalid instance: " + msg); };
    int T = inst.grid.total_slots();
    if (int(inst.price.size()) != T) fail("price series length differs from grid");
    if (int(inst.net_base_load.size()) != T) fail("net base load length differs from grid");
    for (double v : inst.price)
        if (!std::isfinite(v)) fail("non-finite price");
    for (double v : inst.net_base_load)
        if (!std::isfinite(v)) fail("non-finite net base load");
    for (std::size_t i = 0; i < inst.buildings.size(); ++i) {
        auto const& b = inst.buildings[i];
        if (b.id != int(i)) fail("building ids must equal their position");
        if (b.small_rooms < 0 || b.large_rooms < 0) fail("negative room count");
    }
    for (std::size_t i = 0; i < inst.batteries.size(); ++i) {
        auto const& b = inst.batteries[i];
        if (!(b.max_power > 0)) fail("battery max power must be positive");
        if (!(b.efficiency > 0 && b.efficiency <= 1)) fail("battery efficiency must lie in (0, 1]");
        if (b.capacity < 0 || b.initial < 0 || b.initial > b.capacity)
            fail("battery initial charge must lie in [0, capacity]");
    }
    int n = int(inst.activities.size());
    for (int i = 0; i < n; ++i) {
        auto const& a = inst.activities[i];
        std::string tag = "activity " + std::to_string(i) + ": ";
        if (a.id != i) fail(tag + "ids must equal their position");
        if (a.duration < 1) fail(tag + "duration must be at least one slot");
        if (a.small_rooms < 0 || a.large_rooms < 0 || a.rooms() < 1) fail(tag + "needs at least one room");
        if (a.power < 0) fail(tag + "negative power");
        if (a.value < 0 || a.penalty < 0) fail(tag + "negative value or penalty");
        for (int p : a.prerequisites) {
            if (p < 0 || p >= n || p == i) fail(tag + "prerequisite id out of range");
            if (inst.activities[p].kind != a.kind) fail(tag + "prerequisite of a different kind");
        }
    }
    // Kahn's algorithm; leftover nodes sit on a cycle.
    std::vector<int> indeg(n, 0);
    std::vector<std::vector<int>> succ(n);
    for (auto const& a : inst.activities)
        for (int p : a.prerequisites) {
            succ[p].push_back(a.id);
            ++indeg[a.id];
        }
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    int seen = 0;
    while (!ready.empty()) {
        int u = ready.back();
        ready.pop_back();
        ++seen;
        for (int v : succ[u])
            if (--indeg[v] == 0) ready.push_back(v);
    }
    if (seen != n) fail("precedence graph has a cycle");
}

enum class BatteryAction : char { charge = 'c', hold = 'h', discharge = 'd' };

/// Start and building of one scheduled activity. Recurring starts are
/// relative to 00:00 of the first Monday (0 .. week_slots-1); once-off starts
/// are absolute slots.
struct Placement {
    int start = 0;
    int building = 0;

    friend bool operator==(Placement const&, Placement const&) = default;
};

struct Schedule {
    std::vector<std::optional<Placement>> activities;     // by activity id
    std::vector<std::vector<BatteryAction>> batteries;    // by battery id, one action per slot

    /// Nothing scheduled, every battery holds.
    static Schedule empty(Instance const& inst) {
        Schedule s;
        s.activities.assign(inst.activities.size(), std::nullopt);
        s.batteries.assign(inst.batteries.size(),
                           std::vector<BatteryAction>(inst.grid.total_slots(), BatteryAction::hold));
        return s;
    }

    friend bool operator==(Schedule const&, Schedule const&) = default;
};

/// Throws std::invalid_argument when ids, slots or lengths do not resolve.
/// Feasibility is not checked here.
inline void check_structure(Instance const& inst, Schedule const& s) {
    auto fail = [](std::string const& msg) { throw std::invalid_argument("invalid schedule: " + msg); };
    if (s.activities.size() != inst.activities.size()) fail("activity count differs from instance");
    if (s.batteries.size() != inst.batteries.size()) fail("battery count differs from instance");
    int T = inst.grid.total_slots();
    int B = int(inst.buildings.size());
    for (std::size_t i = 0; i < s.activities.size(); ++i) {
        auto const& p = s.activities[i];
        if (!p) continue;
        std::string tag = "activity " + std::to_string(i) + ": ";
        if (p->building < 0 || p->building >= B) fail(tag + "building id out of range");
        int limit = inst.activities[i].recurring() ? inst.grid.week_slots() : T;
        if (p->start < 0 || p->start >= limit) fail(tag + "start slot out of range");
    }
    for (std::size_t b = 0; b < s.batteries.size(); ++b)
        if (int(s.batteries[b].size()) != T)
            fail("battery " + std::to_string(b) + ": action string length differs from grid");
}

struct Interval {
    int begin = 0;  // inclusive
    int end = 0;    // exclusive

    friend bool operator==(Interval const&, Interval const&) = default;
};

/// Absolute slot intervals an activity occupies under a placement. Recurring
/// activities repeat every week from the first Monday for as long as the whole
/// occurrence fits in the grid.
inline std::vector<Interval> occurrence_slots(TimeGrid const& grid, Activity const& a, Placement const& p) {
    std::vector<Interval> out;
    int T = grid.total_slots();
    if (a.recurring()) {
        if (p.start < 0 || p.start + a.duration > grid.week_slots())
            throw std::invalid_argument("recurring occurrence crosses the week boundary");
        for (int b = grid.first_monday_offset() + p.start; b + a.duration <= T; b += grid.week_slots())
            out.push_back({b, b + a.duration});
    } else {
        if (p.start < 0 || p.start + a.duration > T)
            throw std::invalid_argument("once-off occurrence exceeds the grid");
        out.push_back({p.start, p.start + a.duration});
    }
    return out;
}

/// Day used for precedence: weekday index within the first week for
/// recurring activities, calendar day for once-offs.
inline int precedence_day(TimeGrid const& grid, Placement const& p) {
    return p.start / grid.steps_per_day();
}

}  // namespace predopt
