#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/heuristics/objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace predopt::heuristics {

/// Product state-of-charge lattice: battery b sits at level k in
/// [0, levels[b]) with SoC = initial + (k - start[b]) * step.
class BatteryLattice {
public:
    static constexpr int kMaxStates = 1 << 16;

    explicit BatteryLattice(std::vector<Battery> const& bats) : bats_(bats) {
        states_ = 1;
        for (auto const& b : bats) {
            double step = b.step_energy();
            int down = int(std::floor((b.initial + kSocTolerance) / step));
            int up = int(std::floor((b.capacity - b.initial + kSocTolerance) / step));
            start_.push_back(down);
            levels_.push_back(down + up + 1);
            if (long(states_) * levels_.back() > kMaxStates)
                throw SearchLimitError("battery state space exceeds " + std::to_string(kMaxStates) + " states");
            states_ *= levels_.back();
        }
        // Action combos, hold first for every battery, battery 0 most significant.
        int n = int(bats.size());
        int combos = 1;
        for (int b = 0; b < n; ++b) combos *= 3;
        static constexpr std::array<BatteryAction, 3> order{BatteryAction::hold, BatteryAction::charge,
                                                            BatteryAction::discharge};
        for (int c = 0; c < combos; ++c) {
            Combo combo;
            combo.actions.resize(n);
            combo.delta.resize(n);
            double g = 0.0;
            for (int b = n - 1, rest = c; b >= 0; --b, rest /= 3) combo.actions[b] = order[rest % 3];
            for (int b = 0; b < n; ++b) {
                auto a = combo.actions[b];
                combo.delta[b] = a == BatteryAction::charge ? 1 : a == BatteryAction::discharge ? -1 : 0;
                if (a == BatteryAction::charge) g += bats[b].charge_draw();
                else if (a == BatteryAction::discharge) g -= bats[b].discharge_supply();
            }
            combo.grid = g;
            combos_.push_back(std::move(combo));
        }
    }

    struct Combo {
        std::vector<BatteryAction> actions;
        std::vector<int> delta;
        double grid = 0.0;  // kW exchanged with the grid
    };

    int states() const { return states_; }
    std::vector<Combo> const& combos() const { return combos_; }

    int initial_state() const { return encode(start_); }

    int encode(std::vector<int> const& level) const {
        int s = 0;
        for (std::size_t b = 0; b < level.size(); ++b) s = s * levels_[b] + level[b];
        return s;
    }

    /// State after applying a combo, or -1 when some battery leaves its range.
    int next(int state, Combo const& c) const {
        int n = int(levels_.size());
        int out = 0, mult = 1;
        for (int b = n - 1; b >= 0; --b) {
            int k = state % levels_[b] + c.delta[b];
            state /= levels_[b];
            if (k < 0 || k >= levels_[b]) return -1;
            out += k * mult;
            mult *= levels_[b];
        }
        return out;
    }

    double min_grid() const {
        double g = 0.0;
        for (auto const& c : combos_) g = std::min(g, c.grid);
        return g;
    }

private:
    std::vector<Battery> bats_;
    std::vector<int> start_, levels_;
    int states_ = 1;
    std::vector<Combo> combos_;
};

/// kW each slot of a plan exchanges with the grid, in battery_load_profile's
/// summation order.
inline std::vector<double> plan_grid_load(Instance const& inst, std::vector<std::vector<BatteryAction>> const& plan) {
    Schedule s;
    s.batteries = plan;
    std::vector<double> load(inst.grid.total_slots(), 0.0);
    for (std::size_t b = 0; b < inst.batteries.size(); ++b) {
        double in = inst.batteries[b].charge_draw();
        double out = inst.batteries[b].discharge_supply();
        for (std::size_t t = 0; t < load.size(); ++t) {
            if (plan[b][t] == BatteryAction::charge) load[t] += in;
            else if (plan[b][t] == BatteryAction::discharge) load[t] -= out;
        }
    }
    return load;
}

/// Inputs of the dispatch DP. `cap_base` is the per-slot load the cap is
/// checked against (worst scenario when there are several); the energy term
/// only needs prices because the base energy is a constant.
struct DispatchProblem {
    std::span<double const> price;
    std::vector<double> cap_base;  // base + activity load per slot
};

inline DispatchProblem dispatch_problem(Instance const& inst, Objective const& obj, std::span<double const> activity) {
    DispatchProblem p{inst.price, std::vector<double>(activity.size(), -std::numeric_limits<double>::infinity())};
    for (auto const& base : obj.bases(inst))
        for (std::size_t t = 0; t < activity.size(); ++t) p.cap_base[t] = std::max(p.cap_base[t], base[t] + activity[t]);
    return p;
}

class DispatchSolver {
public:
    DispatchSolver(Instance const& inst) : inst_(inst), lat_(inst.batteries) {}

    BatteryLattice const& lattice() const { return lat_; }

    /// Minimum energy-cost plan with every net load at most `cap`; ties go to
    /// holding. Throws InfeasibleError when no plan respects the cap.
    std::vector<std::vector<BatteryAction>> solve(DispatchProblem const& p, double cap) {
        int T = int(p.price.size());
        int S = lat_.states();
        auto const& combos = lat_.combos();
        constexpr double inf = std::numeric_limits<double>::infinity();
        cost_.assign(std::size_t(T + 1) * S, inf);
        std::fill(cost_.begin() + std::size_t(T) * S, cost_.end(), 0.0);
        if (next_.empty()) {
            next_.resize(std::size_t(S) * combos.size());
            for (int s = 0; s < S; ++s)
                for (std::size_t c = 0; c < combos.size(); ++c) next_[s * combos.size() + c] = lat_.next(s, combos[c]);
        }
        std::vector<char> allowed(combos.size());
        for (int t = T - 1; t >= 0; --t) {
            bool any = false;
            for (std::size_t c = 0; c < combos.size(); ++c) {
                allowed[c] = p.cap_base[t] + combos[c].grid <= cap + 1e-9;
                any = any || allowed[c];
            }
            if (!any)
                throw InfeasibleError("peak cap " + std::to_string(cap) + " is below the base load at slot " +
                                      std::to_string(t));
            double const* after = &cost_[std::size_t(t + 1) * S];
            double* here = &cost_[std::size_t(t) * S];
            for (int s = 0; s < S; ++s) {
                double best = inf;
                for (std::size_t c = 0; c < combos.size(); ++c) {
                    if (!allowed[c]) continue;
                    int n = next_[s * combos.size() + c];
                    if (n < 0) continue;
                    double v = p.price[t] * combos[c].grid + after[n];
                    if (v < best) best = v;
                }
                here[s] = best;
            }
        }
        int s = lat_.initial_state();
        if (cost_[s] == inf) throw InfeasibleError("no battery plan keeps the net load under the cap");
        std::vector<std::vector<BatteryAction>> plan(inst_.batteries.size(), std::vector<BatteryAction>(T));
        for (int t = 0; t < T; ++t) {
            double const* after = &cost_[std::size_t(t + 1) * S];
            double target = cost_[std::size_t(t) * S + s];
            for (std::size_t c = 0; c < combos.size(); ++c) {
                if (!(p.cap_base[t] + combos[c].grid <= cap + 1e-9)) continue;
                int n = next_[s * combos.size() + c];
                if (n < 0) continue;
                if (p.price[t] * combos[c].grid + after[n] == target) {
                    for (std::size_t b = 0; b < plan.size(); ++b) plan[b][t] = combos[c].actions[b];
                    s = n;
                    break;
                }
            }
        }
        return plan;
    }

private:
    Instance const& inst_;
    BatteryLattice lat_;
    std::vector<double> cost_;
    std::vector<int> next_;
};

/// Exact minimum energy-cost dispatch for a fixed activity schedule, subject
/// to net load <= peak_cap when a cap is given.
inline std::vector<std::vector<BatteryAction>> optimize_battery(Instance const& inst, Schedule const& s,
                                                                std::optional<double> peak_cap = std::nullopt,
                                                                Objective const& obj = {}) {
    check_structure(inst, s);
    auto act = activity_load_profile(inst, s);
    DispatchSolver solver(inst);
    return solver.solve(dispatch_problem(inst, obj, act), peak_cap.value_or(std::numeric_limits<double>::infinity()));
}

struct BatteryTotalOptions {
    int exact_limit = 64;  // evaluate every candidate cap up to this many
    int coarse_points = 12;
};

/// Battery plan minimising the full objective for fixed activities. The
/// demand charge couples the slots, so the energy DP is run under a set of
/// peak caps (every net load level a plan can produce at some slot between
/// the lowest reachable peak and the uncapped optimum's peak) and each
/// resulting plan is priced with the true objective. With at most
/// `exact_limit` candidate caps the result is exact for the deterministic
/// objective; above that a coarse sweep is refined around its best cap. The
/// incoming plan is kept unless a candidate is strictly cheaper.
inline Schedule optimize_battery_total(Instance const& inst, Schedule s, Objective const& obj = {},
                                       BatteryTotalOptions opt = {}) {
    check_structure(inst, s);
    if (inst.batteries.empty()) return s;
    auto act = activity_load_profile(inst, s);
    auto bases = obj.bases(inst);
    auto problem = dispatch_problem(inst, obj, act);
    DispatchSolver solver(inst);

    auto price_plan = [&](std::vector<std::vector<BatteryAction>> const& plan) {
        auto bat = plan_grid_load(inst, plan);
        return aggregate_grid_cost(obj.mode, bases, bat, act, inst.price);
    };

    Schedule best = s;
    double best_cost = price_plan(s.batteries);
    auto consider = [&](double cap) {
        try {
            auto plan = solver.solve(problem, cap);
            double c = price_plan(plan);
            if (c < best_cost) {
                best_cost = c;
                best.batteries = std::move(plan);
            }
            return c;
        } catch (InfeasibleError const&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    auto free_plan = solver.solve(problem, std::numeric_limits<double>::infinity());
    auto free_load = plan_grid_load(inst, free_plan);
    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < act.size(); ++t) upper = std::max(upper, problem.cap_base[t] + free_load[t]);
    consider(std::numeric_limits<double>::infinity());

    double g_min = solver.lattice().min_grid();
    double lower = -std::numeric_limits<double>::infinity();
    for (double v : problem.cap_base) lower = std::max(lower, v + g_min);

    std::vector<double> caps;
    for (double v : problem.cap_base)
        for (auto const& c : solver.lattice().combos()) {
            double level = v + c.grid;
            if (level >= lower && level < upper) caps.push_back(level);
        }
    std::sort(caps.begin(), caps.end());
    caps.erase(std::unique(caps.begin(), caps.end()), caps.end());

    int n = int(caps.size());
    if (n <= opt.exact_limit) {
        for (double cap : caps) consider(cap);
        return best;
    }
    // Coarse sweep, then zoom into the bracket around the best coarse cap.
    int lo = 0, hi = n - 1;
    while (hi - lo + 1 > opt.exact_limit) {
        int pts = std::max(3, opt.coarse_points);
        int best_i = lo;
        double best_v = std::numeric_limits<double>::infinity();
        std::vector<int> idx;
        for (int k = 0; k < pts; ++k) idx.push_back(lo + int((long(hi - lo) * k) / (pts - 1)));
        for (int i : idx) {
            double v = consider(caps[i]);
            if (v < best_v) {
                best_v = v;
                best_i = i;
            }
        }
        int pos = int(std::find(idx.begin(), idx.end(), best_i) - idx.begin());
        int new_lo = idx[std::max(0, pos - 1)];
        int new_hi = idx[std::min(int(idx.size()) - 1, pos + 1)];
        if (new_lo == lo && new_hi == hi) break;
        lo = new_lo;
        hi = new_hi;
    }
    if (hi - lo + 1 <= opt.exact_limit)
        for (int i = lo; i <= hi; ++i) consider(caps[i]);
    return best;
}

}  // namespace predopt::heuristics
