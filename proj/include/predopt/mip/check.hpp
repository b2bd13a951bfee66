#pragma once

#include "predopt/evaluator.hpp"
#include "predopt/mip/model.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace predopt::mip {

inline constexpr double kCheckTolerance = 1e-6;

/// Value per variable id; NaN marks a variable without a value.
struct Assignment {
    std::vector<double> values;

    static Assignment missing(MipModel const& m) {
        return {std::vector<double>(m.vars.size(), std::numeric_limits<double>::quiet_NaN())};
    }
};

/// Integer peak level used by the one-hot encoding of a peak eta >= 0.
inline int peak_level(double eta) {
    if (eta <= kCheckTolerance) return 0;
    return int(std::ceil(eta - 1e-9));
}

/// Point encoding of a schedule. Unscheduled once-offs and activities without
/// occurrences leave their variables at zero. Building ids are ignored; rooms
/// live at aggregate level in the model.
inline Assignment encode_schedule(MipModel const& m, Instance const& inst, Schedule const& s) {
    check_structure(inst, s);
    auto const& map = m.map;
    int T = inst.grid.total_slots();
    int D = inst.grid.steps_per_day();
    Assignment out{std::vector<double>(m.vars.size(), 0.0)};
    auto set = [&](int var, double value) { out.values[var] = value; };

    for (auto const& a : inst.activities) {
        auto const& p = s.activities[a.id];
        set(map.d[a.id], double(m.day_sentinel));
        if (!p) continue;
        if (p->start < 0 || p->start >= int(map.z[a.id].size()) || map.z[a.id][p->start] < 0)
            throw std::invalid_argument("activity " + std::to_string(a.id) + ": start " + std::to_string(p->start) +
                                        " is not an admissible start in the model");
        set(map.z[a.id][p->start], 1.0);
        for (int t = p->start; t < p->start + a.duration; ++t) set(map.v[a.id][t], 1.0);
        set(map.w[a.id], 1.0);
        set(map.d[a.id], double(p->start / D));
        if (!a.recurring() && onceoff_after_hours(inst.grid, p->start, a.duration)) set(map.u[a.id], 1.0);
    }

    for (int b = 0; b < int(inst.batteries.size()); ++b) {
        auto soc = battery_soc_trace(inst, s, b);
        for (int t = 0; t < T; ++t) {
            set(map.x[b][t], s.batteries[b][t] == BatteryAction::charge ? 1.0 : 0.0);
            set(map.y[b][t], s.batteries[b][t] == BatteryAction::discharge ? 1.0 : 0.0);
            set(map.s[b][t], soc[t]);
        }
    }

    auto bat = battery_load_profile(inst, s);
    auto act = activity_load_profile(inst, s);
    for (int k = 0; k < int(m.base_loads.size()); ++k) {
        auto load = assemble_net_load(m.base_loads[k], bat, act);
        double eta = 0.0;
        for (int t = 0; t < T; ++t) {
            set(map.ell[k][t], load[t]);
            eta = std::max(eta, std::abs(load[t]));
        }
        set(map.eta[k], eta);
        if (int level = peak_level(eta); level > 0) {
            if (level > m.peak_bound) throw std::invalid_argument("peak exceeds the model's bound M");
            set(map.lambda[k][level - 1], 1.0);
        }
    }
    return out;
}

struct CheckResult {
    bool feasible = true;
    double objective = 0.0;
    std::vector<std::string> violated;  // row names, or "bound:<var>" / "integrality:<var>" / "one_hot:<var>"
};

inline double row_activity(Constraint const& row, Assignment const& x) {
    double lhs = 0.0;
    for (auto const& tm : row.terms) lhs += tm.coef * x.values[tm.var];
    return lhs;
}

/// Evaluates bounds, integrality and every row within kCheckTolerance. Peak
/// level variables must be integral even though exports relax them.
inline CheckResult check_assignment(MipModel const& m, Assignment const& x) {
    if (x.values.size() != m.vars.size()) throw std::invalid_argument("assignment size differs from model");
    for (std::size_t i = 0; i < m.vars.size(); ++i)
        if (std::isnan(x.values[i])) throw DomainError("missing value for variable '" + m.vars[i].name + "'");

    CheckResult r;
    auto fail = [&](std::string what) {
        r.feasible = false;
        r.violated.push_back(std::move(what));
    };
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
        auto const& v = m.vars[i];
        double val = x.values[i];
        if (val < v.lb - kCheckTolerance || val > v.ub + kCheckTolerance) fail("bound:" + v.name);
        if (v.kind != VarKind::continuous && std::abs(val - std::round(val)) > kCheckTolerance)
            fail("integrality:" + v.name);
    }
    for (auto const& row : m.rows) {
        double lhs = row_activity(row, x);
        bool ok = row.sense == Sense::le   ? lhs <= row.rhs + kCheckTolerance
                  : row.sense == Sense::ge ? lhs >= row.rhs - kCheckTolerance
                                           : std::abs(lhs - row.rhs) <= kCheckTolerance;
        if (!ok) fail(row.name);
    }
    for (auto const& levels : m.map.lambda) {
        int on = 0;
        for (int var : levels) on += std::abs(x.values[var] - 1.0) <= kCheckTolerance;
        for (int var : levels)
            if (std::abs(x.values[var]) > kCheckTolerance && std::abs(x.values[var] - 1.0) > kCheckTolerance)
                fail("one_hot:" + m.vars[var].name);
        if (on > 1) fail("one_hot:" + m.vars[levels.front()].name);
    }
    predopt::detail::StableSum obj;
    for (auto const& tm : m.objective) obj.add(tm.coef * x.values[tm.var]);
    r.objective = obj.value() + m.objective_constant;
    return r;
}

/// Reads starts and battery actions back from an integral assignment. Every
/// activity is placed in building 0; use assign_rooms to spread them out.
inline Schedule decode_assignment(MipModel const& m, Instance const& inst, Assignment const& x) {
    Schedule s = Schedule::empty(inst);
    for (auto const& a : inst.activities)
        for (int start : m.map.starts[a.id])
            if (x.values[m.map.z[a.id][start]] > 0.5) {
                s.activities[a.id] = Placement{start, 0};
                break;
            }
    for (int b = 0; b < int(inst.batteries.size()); ++b)
        for (int t = 0; t < inst.grid.total_slots(); ++t) {
            if (x.values[m.map.x[b][t]] > 0.5) s.batteries[b][t] = BatteryAction::charge;
            else if (x.values[m.map.y[b][t]] > 0.5) s.batteries[b][t] = BatteryAction::discharge;
        }
    return s;
}

}  // namespace predopt::mip
