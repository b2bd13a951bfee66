#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/windows.hpp"
#include "predopt/heuristics/battery.hpp"
#include "predopt/heuristics/exact.hpp"
#include "predopt/heuristics/objective.hpp"
#include "predopt/heuristics/precedence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <functional>
#include <vector>

namespace predopt::heuristics {

/// What a local search minimises. `total` is the solver objective,
/// `energy_profit` drops the demand charge (used under a peak cap) and
/// `peak` is the highest net load over all bases.
enum class SearchGoal { total, energy_profit, peak };

struct LocalSearchParams {
    long max_evaluations = 20'000;  // candidate moves priced; 0 returns the input
    long stall_limit = 4'000;       // consecutive non-improving candidates
    double time_limit = 0.0;        // seconds, 0 = unlimited
    std::optional<double> peak_cap;  // hard limit on every net load
    std::vector<char> free;          // per activity; empty = all movable
    bool battery_moves = true;
    SearchGoal goal = SearchGoal::total;
};

namespace detail {

/// Incremental schedule state for move evaluation. Load arrays are patched in
/// place and restored from saved copies, so no rounding drifts in; accepted
/// moves are re-priced from scratch with the evaluator.
class SearchState {
public:
    SearchState(Instance const& inst, Objective const& obj, Schedule s, SearchGoal goal, std::optional<double> cap)
        : inst_(inst),
          obj_(obj),
          goal_(goal),
          cap_(cap),
          bases_(obj.bases(inst)),
          lattice_(inst.batteries),
          succ_(successors(inst)),
          sched_(std::move(s)) {
        T_ = inst.grid.total_slots();
        for (auto const& a : inst.activities) {
            starts_.push_back(admissible_starts(inst, a, after_hours_prune_is_safe(inst, a, succ_)));
            std::vector<char> ok(a.recurring() ? inst.grid.week_slots() : T_, 0);
            for (int st : starts_.back()) ok[st] = 1;
            allowed_.push_back(std::move(ok));
        }
        for (auto const& b : inst.batteries) {
            step_.push_back(b.step_energy());
            cap_kwh_.push_back(b.capacity);
        }
        rebuild();
    }

    Schedule const& schedule() const { return sched_; }
    double value() const { return value_; }
    std::vector<std::vector<int>> const& starts() const { return starts_; }
    std::vector<std::vector<int>> const& succ() const { return succ_; }

    bool allowed(int id, int start) const {
        auto const& ok = allowed_[id];
        return start >= 0 && start < int(ok.size()) && ok[start];
    }

    /// Re-derive every array from the evaluator and price the schedule.
    void rebuild() {
        act_ = activity_load_profile(inst_, sched_);
        bat_ = battery_load_profile(inst_, sched_);
        profit_ = onceoff_profit(inst_, sched_);
        int B = int(inst_.buildings.size());
        small_.assign(std::size_t(B) * T_, 0);
        large_.assign(std::size_t(B) * T_, 0);
        for (auto const& a : inst_.activities)
            if (auto const& p = sched_.activities[a.id]) occupy(a, *p, +1);
        soc_.clear();
        for (int b = 0; b < int(inst_.batteries.size()); ++b) soc_.push_back(battery_soc_trace(inst_, sched_, b));
        value_ = exact_value();
    }

    double exact_value() const {
        switch (goal_) {
            case SearchGoal::total: return obj_(inst_, sched_);
            case SearchGoal::energy_profit:
                return aggregate_grid_cost(obj_.mode, bases_, bat_, act_, inst_.price, false) - profit_;
            case SearchGoal::peak: return max_net_load(bases_, bat_, act_);
        }
        return 0.0;
    }

    bool within_cap() const { return !cap_ || max_net_load(bases_, bat_, act_) <= *cap_ + 1e-9; }

    /// Value of the schedule with activity `id` moved to `p` (nullopt =
    /// unscheduled), or nullopt when the move is infeasible or breaks the cap.
    std::optional<double> try_activity(int id, std::optional<Placement> p) {
        auto const& a = inst_.activities[id];
        auto const old = sched_.activities[id];
        if (old == p) return std::nullopt;
        if (!p && a.recurring()) return std::nullopt;
        if (p) {
            if (p->building < 0 || p->building >= int(inst_.buildings.size()) || !allowed(id, p->start))
                return std::nullopt;
            int day = precedence_day(inst_.grid, *p);
            for (int pre : a.prerequisites) {
                auto const& q = sched_.activities[pre];
                if (!q || precedence_day(inst_.grid, *q) >= day) return std::nullopt;
            }
            for (int nx : succ_[id]) {
                auto const& q = sched_.activities[nx];
                if (q && precedence_day(inst_.grid, *q) <= day) return std::nullopt;
            }
        } else {
            for (int nx : succ_[id])
                if (sched_.activities[nx]) return std::nullopt;
        }
        saved_act_ = act_;
        if (old) occupy(a, *old, -1);
        bool fits = !p || room_for(a, *p);
        std::optional<double> result;
        if (fits) {
            double kw = a.load();
            if (old)
                for (auto iv : occurrence_slots(inst_.grid, a, *old))
                    for (int t = iv.begin; t < iv.end; ++t) act_[t] -= kw;
            if (p)
                for (auto iv : occurrence_slots(inst_.grid, a, *p))
                    for (int t = iv.begin; t < iv.end; ++t) act_[t] += kw;
            double profit = profit_ - placement_profit(a, old) + placement_profit(a, p);
            if (within_cap()) result = quick_value(profit);
        }
        if (old) occupy(a, *old, +1);
        act_ = saved_act_;
        return result;
    }

    void commit_activity(int id, std::optional<Placement> p) {
        sched_.activities[id] = p;
        rebuild();
    }

    /// Value with battery b's actions replaced at the given slots.
    std::optional<double> try_battery(int b, std::span<int const> slots, std::span<BatteryAction const> actions) {
        auto& plan = sched_.batteries[b];
        double delta_soc = 0.0;
        bool changed = false;
        for (std::size_t i = 0; i < slots.size(); ++i) changed = changed || plan[slots[i]] != actions[i];
        if (!changed) return std::nullopt;
        // SoC shift is piecewise constant between the touched slots.
        std::vector<std::pair<int, double>> shifts;
        for (std::size_t i = 0; i < slots.size(); ++i)
            shifts.push_back({slots[i], (level(actions[i]) - level(plan[slots[i]])) * step_[b]});
        std::sort(shifts.begin(), shifts.end());
        auto const& soc = soc_[b];
        std::size_t k = 0;
        for (int t = shifts.front().first; t < T_; ++t) {
            while (k < shifts.size() && shifts[k].first == t) delta_soc += shifts[k++].second;
            if (k == shifts.size() && std::abs(delta_soc) < 1e-12) break;
            double v = soc[t] + delta_soc;
            if (v < -kSocTolerance || v > cap_kwh_[b] + kSocTolerance) return std::nullopt;
        }
        saved_bat_.clear();
        for (std::size_t i = 0; i < slots.size(); ++i) saved_bat_.push_back(bat_[slots[i]]);
        double in = inst_.batteries[b].charge_draw(), out = inst_.batteries[b].discharge_supply();
        for (std::size_t i = 0; i < slots.size(); ++i) {
            int t = slots[i];
            bat_[t] += grid(plan[t], in, out) * -1.0 + grid(actions[i], in, out);
        }
        std::optional<double> result;
        if (within_cap()) result = quick_value(profit_);
        for (std::size_t i = 0; i < slots.size(); ++i) bat_[slots[i]] = saved_bat_[i];
        return result;
    }

    void commit_battery(int b, std::span<int const> slots, std::span<BatteryAction const> actions) {
        for (std::size_t i = 0; i < slots.size(); ++i) sched_.batteries[b][slots[i]] = actions[i];
        rebuild();
    }

    void restore(Schedule s) {
        sched_ = std::move(s);
        rebuild();
    }

    BatteryAction action(int b, int t) const { return sched_.batteries[b][t]; }
    int slots() const { return T_; }

private:
    static int level(BatteryAction a) {
        return a == BatteryAction::charge ? 1 : a == BatteryAction::discharge ? -1 : 0;
    }
    static double grid(BatteryAction a, double in, double out) {
        return a == BatteryAction::charge ? in : a == BatteryAction::discharge ? -out : 0.0;
    }

    double placement_profit(Activity const& a, std::optional<Placement> const& p) const {
        if (!p || a.recurring()) return 0.0;
        return is_after_hours(inst_.grid, a, *p) ? a.value - a.penalty : a.value;
    }

    double quick_value(double profit) const {
        switch (goal_) {
            case SearchGoal::total:
                return aggregate_grid_cost(obj_.mode, bases_, bat_, act_, inst_.price) - profit;
            case SearchGoal::energy_profit:
                return aggregate_grid_cost(obj_.mode, bases_, bat_, act_, inst_.price, false) - profit;
            case SearchGoal::peak: return max_net_load(bases_, bat_, act_);
        }
        return 0.0;
    }

    void occupy(Activity const& a, Placement const& p, int sign) {
        std::size_t base = std::size_t(p.building) * T_;
        for (auto iv : occurrence_slots(inst_.grid, a, p))
            for (int t = iv.begin; t < iv.end; ++t) {
                small_[base + t] += sign * a.small_rooms;
                large_[base + t] += sign * a.large_rooms;
            }
    }

    bool room_for(Activity const& a, Placement const& p) const {
        auto const& bd = inst_.buildings[p.building];
        std::size_t base = std::size_t(p.building) * T_;
        for (auto iv : occurrence_slots(inst_.grid, a, p))
            for (int t = iv.begin; t < iv.end; ++t)
                if (small_[base + t] + a.small_rooms > bd.small_rooms || large_[base + t] + a.large_rooms > bd.large_rooms)
                    return false;
        return true;
    }

    Instance const& inst_;
    Objective const& obj_;
    SearchGoal goal_;
    std::optional<double> cap_;
    std::vector<std::span<double const>> bases_;
    BatteryLattice lattice_;
    std::vector<std::vector<int>> succ_;
    Schedule sched_;
    int T_ = 0;

    std::vector<std::vector<int>> starts_;
    std::vector<std::vector<char>> allowed_;
    std::vector<double> step_, cap_kwh_;

    std::vector<double> act_, bat_, saved_act_, saved_bat_;
    std::vector<int> small_, large_;
    std::vector<std::vector<double>> soc_;
    double profit_ = 0.0;
    double value_ = 0.0;
};

}  // namespace detail

/// First-improvement hill climbing. Each step samples one move: shift a start
/// (neighbouring admissible start, same time one day over, or any admissible
/// start), change building, schedule or drop a once-off, flip one battery
/// action, or a charge/discharge pair on one battery. A move is taken only
/// when the evaluator confirms a strict decrease of the search value and
/// every intermediate schedule stays feasible (and under `peak_cap`).
template <class Rng>
SolveReport local_search(Instance const& inst, Schedule const& start, LocalSearchParams const& params, Rng& rng,
                         Objective const& obj = {}) {
    Stopwatch clock(params.time_limit);
    require_feasible(inst, start, "input schedule");
    if (!params.free.empty() && params.free.size() != inst.activities.size())
        throw std::invalid_argument("free mask length differs from instance");
    detail::SearchState st(inst, obj, start, params.goal, params.peak_cap);

    SolveReport r;
    r.initial_objective = obj(inst, start);
    r.trace = {st.value()};
    r.termination = Termination::converged;

    std::vector<int> movable, onceoffs;
    for (auto const& a : inst.activities)
        if (params.free.empty() || params.free[a.id]) {
            movable.push_back(a.id);
            if (!a.recurring()) onceoffs.push_back(a.id);
        }
    int NB = int(inst.batteries.size());
    int T = st.slots();
    int spd = inst.grid.steps_per_day();
    int B = int(inst.buildings.size());
    bool batteries = params.battery_moves && NB > 0 && T > 0;
    if (movable.empty() && !batteries) {
        r.schedule = st.schedule();
        r.objective = obj(inst, r.schedule);
        r.wall_seconds = clock.elapsed();
        return r;
    }

    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    long stall = 0;
    while (r.evaluations < params.max_evaluations) {
        if (stall >= params.stall_limit) break;
        if ((r.evaluations & 63) == 63 && clock.expired()) {
            r.termination = Termination::budget;
            break;
        }
        ++r.evaluations;
        int kinds = (movable.empty() ? 0 : 4) + (batteries ? 2 : 0);
        int kind = pick(kinds);
        if (movable.empty()) kind += 4;

        std::optional<double> cand;
        std::function<void()> commit;
        if (kind < 4) {
            int id = movable[pick(int(movable.size()))];
            auto const& a = inst.activities[id];
            auto cur = st.schedule().activities[id];
            auto const& starts = st.starts()[id];
            std::optional<Placement> next;
            if (kind == 3 && !a.recurring()) {
                if (cur) next = std::nullopt;
                else if (!starts.empty()) next = Placement{starts[pick(int(starts.size()))], pick(B)};
                else {
                    ++stall;
                    continue;
                }
            } else {
                if (!cur || starts.empty()) {
                    ++stall;
                    continue;
                }
                Placement p = *cur;
                if (kind == 0) {
                    auto it = std::lower_bound(starts.begin(), starts.end(), p.start);
                    int i = int(it - starts.begin()) + (pick(2) == 0 ? -1 : 1);
                    if (i < 0 || i >= int(starts.size())) {
                        ++stall;
                        continue;
                    }
                    p.start = starts[i];
                } else if (kind == 1) {
                    p.start += pick(2) == 0 ? -spd : spd;
                } else if (kind == 2) {
                    if (B > 1 && pick(2) == 0) p.building = (p.building + 1 + pick(B - 1)) % B;
                    else p.start = starts[pick(int(starts.size()))];
                } else {
                    p.start = starts[pick(int(starts.size()))];
                }
                next = p;
            }
            cand = st.try_activity(id, next);
            commit = [&st, id, next] { st.commit_activity(id, next); };
        } else {
            int b = pick(NB);
            static constexpr BatteryAction acts[3] = {BatteryAction::hold, BatteryAction::charge,
                                                      BatteryAction::discharge};
            if (kind == 4) {
                int t = pick(T);
                auto cur = st.action(b, t);
                int c = 0;
                while (acts[c] != cur) ++c;
                BatteryAction na = acts[(c + 1 + pick(2)) % 3];
                std::array<int, 1> sl{t};
                std::array<BatteryAction, 1> ac{na};
                cand = st.try_battery(b, sl, ac);
                commit = [&st, b, sl, ac] { st.commit_battery(b, sl, ac); };
            } else {
                int t1 = pick(T), t2 = pick(T);
                if (t1 == t2) {
                    ++stall;
                    continue;
                }
                // Raise the SoC step at t1, lower it at t2.
                auto up = [](BatteryAction x) {
                    return x == BatteryAction::discharge ? BatteryAction::hold : BatteryAction::charge;
                };
                auto down = [](BatteryAction x) {
                    return x == BatteryAction::charge ? BatteryAction::hold : BatteryAction::discharge;
                };
                std::array<int, 2> sl{t1, t2};
                std::array<BatteryAction, 2> ac{up(st.action(b, t1)), down(st.action(b, t2))};
                cand = st.try_battery(b, sl, ac);
                commit = [&st, b, sl, ac] { st.commit_battery(b, sl, ac); };
            }
        }
        if (!cand || !(*cand < st.value())) {
            ++stall;
            continue;
        }
        Schedule before = st.schedule();
        double before_value = st.value();
        commit();
        if (!(st.value() < before_value) || !st.within_cap() || !check_feasibility(inst, st.schedule()).empty()) {
            st.restore(std::move(before));
            ++stall;
            continue;
        }
        stall = 0;
        ++r.iterations;
        r.trace.push_back(st.value());
    }
    if (r.evaluations >= params.max_evaluations) r.termination = Termination::budget;
    r.schedule = st.schedule();
    r.objective = obj(inst, r.schedule);
    r.wall_seconds = clock.elapsed();
    return r;
}

}  // namespace predopt::heuristics
