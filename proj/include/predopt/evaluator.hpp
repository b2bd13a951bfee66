#pragma once

#include "predopt/core/model.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace predopt {

enum class ViolationKind {
    RecurringUnscheduled,
    RecStartOutsideFirstWeek,
    WeekendStart,
    StartBefore9,
    EndAfter17,
    CrossesWeekBoundary,
    PrecedenceViolated,
    PrereqUnscheduled,
    RoomOverbooked,
    BatterySoCUnder,
    BatterySoCOver,
    OnceOffOverflow,
};

inline char const* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::RecurringUnscheduled: return "RecurringUnscheduled";
        case ViolationKind::RecStartOutsideFirstWeek: return "RecStartOutsideFirstWeek";
        case ViolationKind::WeekendStart: return "WeekendStart";
        case ViolationKind::StartBefore9: return "StartBefore9";
        case ViolationKind::EndAfter17: return "EndAfter17";
        case ViolationKind::CrossesWeekBoundary: return "CrossesWeekBoundary";
        case ViolationKind::PrecedenceViolated: return "PrecedenceViolated";
        case ViolationKind::PrereqUnscheduled: return "PrereqUnscheduled";
        case ViolationKind::RoomOverbooked: return "RoomOverbooked";
        case ViolationKind::BatterySoCUnder: return "BatterySoCUnder";
        case ViolationKind::BatterySoCOver: return "BatterySoCOver";
        case ViolationKind::OnceOffOverflow: return "OnceOffOverflow";
    }
    return "?";
}

/// `id` is the activity, building (RoomOverbooked) or battery (SoC kinds).
/// `other` is the prerequisite for precedence kinds, -1 otherwise.
struct Violation {
    ViolationKind kind;
    int id = -1;
    int slot = -1;
    int other = -1;

    friend bool operator==(Violation const&, Violation const&) = default;
};

inline std::string describe(Violation const& v) {
    std::string s = to_string(v.kind);
    switch (v.kind) {
        case ViolationKind::RoomOverbooked: s += " building=" + std::to_string(v.id); break;
        case ViolationKind::BatterySoCUnder:
        case ViolationKind::BatterySoCOver: s += " battery=" + std::to_string(v.id); break;
        default: s += " activity=" + std::to_string(v.id); break;
    }
    if (v.slot >= 0) s += " slot=" + std::to_string(v.slot);
    if (v.other >= 0) s += " prerequisite=" + std::to_string(v.other);
    return s;
}

inline constexpr double kDemandCoefficient = 0.005;  // $/kW^2 on the monthly peak
inline constexpr double kSocTolerance = 1e-9;

namespace detail {

// Neumaier-compensated sum; exact for the small integer-valued fixtures.
class StableSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline bool fits_grid(Instance const& inst, Activity const& a, Placement const& p) {
    if (a.recurring()) return p.start >= 0 && p.start + a.duration <= inst.grid.week_slots();
    return p.start >= 0 && p.start + a.duration <= inst.grid.total_slots();
}

}  // namespace detail

/// kWh per slot; index t holds the state at the end of slot t.
inline std::vector<double> battery_soc_trace(Instance const& inst, Schedule const& s, int battery) {
    if (battery < 0 || battery >= int(inst.batteries.size()))
        throw std::invalid_argument("unknown battery " + std::to_string(battery));
    auto const& b = inst.batteries[battery];
    auto const& actions = s.batteries.at(battery);
    std::vector<double> soc(actions.size());
    double level = b.initial;
    double step = b.step_energy();
    for (std::size_t t = 0; t < actions.size(); ++t) {
        if (actions[t] == BatteryAction::charge) level += step;
        else if (actions[t] == BatteryAction::discharge) level -= step;
        soc[t] = level;
    }
    return soc;
}

/// Every violated rule, not just the first.
inline std::vector<Violation> check_feasibility(Instance const& inst, Schedule const& s) {
    check_structure(inst, s);
    auto const& grid = inst.grid;
    int T = grid.total_slots();
    int spd = grid.steps_per_day();
    std::vector<Violation> out;

    for (auto const& a : inst.activities) {
        auto const& p = s.activities[a.id];
        if (!p) {
            if (a.recurring()) out.push_back({ViolationKind::RecurringUnscheduled, a.id});
            continue;
        }
        if (a.recurring()) {
            int day = p->start / spd;
            int sod = p->start % spd;
            if (p->start + a.duration > grid.week_slots())
                out.push_back({ViolationKind::CrossesWeekBoundary, a.id, p->start});
            if (grid.first_monday_offset() + p->start + a.duration > T)
                out.push_back({ViolationKind::RecStartOutsideFirstWeek, a.id, p->start});
            if (day >= 5) out.push_back({ViolationKind::WeekendStart, a.id, p->start});
            if (sod < grid.office_start()) out.push_back({ViolationKind::StartBefore9, a.id, p->start});
            if (sod + a.duration > grid.office_end()) out.push_back({ViolationKind::EndAfter17, a.id, p->start});
        } else if (p->start + a.duration > T) {
            out.push_back({ViolationKind::OnceOffOverflow, a.id, p->start});
        }
    }

    for (auto const& a : inst.activities) {
        auto const& p = s.activities[a.id];
        if (!p) continue;
        for (int pre : a.prerequisites) {
            auto const& q = s.activities[pre];
            if (!q)
                out.push_back({ViolationKind::PrereqUnscheduled, a.id, p->start, pre});
            else if (precedence_day(grid, *q) >= precedence_day(grid, *p))
                out.push_back({ViolationKind::PrecedenceViolated, a.id, p->start, pre});
        }
    }

    int B = int(inst.buildings.size());
    std::vector<int> small(std::size_t(B) * T, 0), large(std::size_t(B) * T, 0);
    for (auto const& a : inst.activities) {
        auto const& p = s.activities[a.id];
        if (!p || !detail::fits_grid(inst, a, *p)) continue;
        std::size_t base = std::size_t(p->building) * T;
        for (auto iv : occurrence_slots(grid, a, *p))
            for (int t = iv.begin; t < iv.end; ++t) {
                small[base + t] += a.small_rooms;
                large[base + t] += a.large_rooms;
            }
    }
    for (int t = 0; t < T; ++t)
        for (int b = 0; b < B; ++b) {
            std::size_t k = std::size_t(b) * T + t;
            if (small[k] > inst.buildings[b].small_rooms || large[k] > inst.buildings[b].large_rooms)
                out.push_back({ViolationKind::RoomOverbooked, b, t});
        }

    for (int b = 0; b < int(inst.batteries.size()); ++b) {
        auto soc = battery_soc_trace(inst, s, b);
        double cap = inst.batteries[b].capacity;
        for (int t = 0; t < T; ++t) {
            if (soc[t] < -kSocTolerance) out.push_back({ViolationKind::BatterySoCUnder, b, t});
            if (soc[t] > cap + kSocTolerance) out.push_back({ViolationKind::BatterySoCOver, b, t});
        }
    }
    return out;
}

inline bool is_after_hours(TimeGrid const& grid, Activity const& a, Placement const& p) {
    for (auto iv : occurrence_slots(grid, a, p))
        for (int t = iv.begin; t < iv.end; ++t)
            if (!grid.is_office_slot(t)) return true;
    return false;
}

/// kW drawn by scheduled activities per slot, summed in activity id order.
inline std::vector<double> activity_load_profile(Instance const& inst, Schedule const& s) {
    std::vector<double> load(inst.grid.total_slots(), 0.0);
    for (auto const& a : inst.activities) {
        auto const& p = s.activities[a.id];
        if (!p || !detail::fits_grid(inst, a, *p)) continue;
        double kw = a.load();
        for (auto iv : occurrence_slots(inst.grid, a, *p))
            for (int t = iv.begin; t < iv.end; ++t) load[t] += kw;
    }
    return load;
}

/// kW exchanged with the grid by the batteries: m/sqrt(e) when charging,
/// -m*sqrt(e) when discharging.
inline std::vector<double> battery_load_profile(Instance const& inst, Schedule const& s) {
    std::vector<double> load(inst.grid.total_slots(), 0.0);
    for (std::size_t b = 0; b < inst.batteries.size(); ++b) {
        double in = inst.batteries[b].charge_draw();
        double out = inst.batteries[b].discharge_supply();
        auto const& actions = s.batteries[b];
        for (std::size_t t = 0; t < load.size(); ++t) {
            if (actions[t] == BatteryAction::charge) load[t] += in;
            else if (actions[t] == BatteryAction::discharge) load[t] -= out;
        }
    }
    return load;
}

inline std::vector<double> assemble_net_load(std::span<double const> base, std::span<double const> battery,
                                             std::span<double const> activity) {
    std::vector<double> load(base.size());
    for (std::size_t t = 0; t < base.size(); ++t) load[t] = (base[t] + battery[t]) + activity[t];
    return load;
}

inline std::vector<double> net_load_profile(Instance const& inst, Schedule const& s) {
    check_structure(inst, s);
    return assemble_net_load(inst.net_base_load, battery_load_profile(inst, s), activity_load_profile(inst, s));
}

/// Energy and demand terms of a net-load profile.
struct GridCharges {
    double energy_cost = 0.0;
    double demand_charge = 0.0;
    double peak_load = 0.0;

    double total() const { return energy_cost + demand_charge; }
};

/// Energy is priced as 0.25 h * kW / 1000 * $/MWh per slot. The demand charge
/// squares the highest net load; a profile that never draws from the grid
/// pays none.
inline GridCharges grid_charges(std::span<double const> load, std::span<double const> price) {
    detail::StableSum sum;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < load.size(); ++t) {
        sum.add(load[t] * price[t]);
        peak = std::max(peak, load[t]);
    }
    GridCharges g;
    g.energy_cost = sum.value() * TimeGrid::kHoursPerSlot / 1000.0;
    g.peak_load = load.empty() ? 0.0 : peak;
    double billed = std::max(0.0, g.peak_load);
    g.demand_charge = kDemandCoefficient * billed * billed;
    return g;
}

/// Same arithmetic as grid_charges(assemble_net_load(base, battery, activity), price)
/// without materialising the profile.
inline GridCharges grid_charges(std::span<double const> base, std::span<double const> battery,
                                std::span<double const> activity, std::span<double const> price) {
    detail::StableSum sum;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < base.size(); ++t) {
        double l = (base[t] + battery[t]) + activity[t];
        sum.add(l * price[t]);
        peak = std::max(peak, l);
    }
    GridCharges g;
    g.energy_cost = sum.value() * TimeGrid::kHoursPerSlot / 1000.0;
    g.peak_load = base.empty() ? 0.0 : peak;
    double billed = std::max(0.0, g.peak_load);
    g.demand_charge = kDemandCoefficient * billed * billed;
    return g;
}

inline double onceoff_profit(Instance const& inst, Schedule const& s) {
    detail::StableSum sum;
    for (auto const& a : inst.activities) {
        auto const& p = s.activities[a.id];
        if (a.recurring() || !p || !detail::fits_grid(inst, a, *p)) continue;
        sum.add(is_after_hours(inst.grid, a, *p) ? a.value - a.penalty : a.value);
    }
    return sum.value();
}

struct CostBreakdown {
    double energy_cost = 0.0;
    double demand_charge = 0.0;
    double onceoff_profit = 0.0;
    double total = 0.0;
    double peak_load = 0.0;
    std::vector<double> net_load;
    std::vector<int> negative_load_slots;  // warning only
};

/// Prices any structurally valid schedule, feasible or not.
inline CostBreakdown objective_cost(Instance const& inst, Schedule const& s) {
    CostBreakdown c;
    c.net_load = net_load_profile(inst, s);
    auto g = grid_charges(c.net_load, inst.price);
    c.energy_cost = g.energy_cost;
    c.demand_charge = g.demand_charge;
    c.peak_load = g.peak_load;
    c.onceoff_profit = onceoff_profit(inst, s);
    c.total = c.energy_cost + c.demand_charge - c.onceoff_profit;
    for (int t = 0; t < int(c.net_load.size()); ++t)
        if (c.net_load[t] < 0) c.negative_load_slots.push_back(t);
    return c;
}

enum class SaaMode { average, worst_case };

/// Scenario-aggregated objective: grid charges are averaged (or maximised)
/// over net-base-load scenarios, the once-off profit is counted once.
inline double saa_cost(Instance const& inst, Schedule const& s, std::vector<std::vector<double>> const& scenarios,
                       SaaMode mode) {
    if (scenarios.empty()) throw std::invalid_argument("scenario set is empty");
    check_structure(inst, s);
    auto bat = battery_load_profile(inst, s);
    auto act = activity_load_profile(inst, s);
    detail::StableSum sum;
    double worst = -std::numeric_limits<double>::infinity();
    for (auto const& sc : scenarios) {
        if (sc.size() != inst.net_base_load.size())
            throw std::invalid_argument("scenario length differs from grid");
        double c = grid_charges(sc, bat, act, inst.price).total();
        sum.add(c);
        worst = std::max(worst, c);
    }
    double grid = mode == SaaMode::average ? sum.value() / double(scenarios.size()) : worst;
    return grid - onceoff_profit(inst, s);
}

}  // namespace predopt
