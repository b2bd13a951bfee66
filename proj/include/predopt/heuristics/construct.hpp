#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/windows.hpp"
#include "predopt/evaluator.hpp"
#include "predopt/heuristics/battery.hpp"
#include "predopt/heuristics/precedence.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace predopt::heuristics {

namespace detail {

/// Room occupancy per building and slot.
class RoomLedger {
public:
    explicit RoomLedger(Instance const& inst)
        : inst_(&inst),
          T_(inst.grid.total_slots()),
          small_(inst.buildings.size() * std::size_t(T_), 0),
          large_(inst.buildings.size() * std::size_t(T_), 0) {}

    bool fits(Activity const& a, Placement const& p) const {
        auto const& bd = inst_->buildings[p.building];
        std::size_t base = std::size_t(p.building) * T_;
        for (auto iv : occurrence_slots(inst_->grid, a, p))
            for (int t = iv.begin; t < iv.end; ++t)
                if (small_[base + t] + a.small_rooms > bd.small_rooms || large_[base + t] + a.large_rooms > bd.large_rooms)
                    return false;
        return true;
    }

    void add(Activity const& a, Placement const& p, int sign = 1) {
        std::size_t base = std::size_t(p.building) * T_;
        for (auto iv : occurrence_slots(inst_->grid, a, p))
            for (int t = iv.begin; t < iv.end; ++t) {
                small_[base + t] += sign * a.small_rooms;
                large_[base + t] += sign * a.large_rooms;
            }
    }

private:
    Instance const* inst_;
    int T_;
    std::vector<int> small_, large_;
};

/// Backtracking placement of the recurring activities. `candidates(id)`
/// yields placements in preference order; prerequisite days are enforced here.
template <class Candidates>
bool place_recurring(Instance const& inst, Schedule& s, RoomLedger& rooms, Candidates&& candidates, long budget) {
    std::vector<int> order;
    for (int id : topological_order(inst))
        if (inst.activities[id].recurring()) order.push_back(id);
    int n = int(order.size());
    std::vector<std::vector<Placement>> opts(n);
    std::vector<int> choice(n, -1);
    auto options_for = [&](int i) {
        auto const& a = inst.activities[order[i]];
        int min_day = 0;
        for (int pre : a.prerequisites) min_day = std::max(min_day, precedence_day(inst.grid, *s.activities[pre]) + 1);
        std::vector<Placement> out;
        for (auto const& p : candidates(a.id))
            if (precedence_day(inst.grid, p) >= min_day) out.push_back(p);
        return out;
    };
    long nodes = 0;
    int depth = 0;
    if (n > 0) opts[0] = options_for(0);
    while (depth >= 0 && depth < n) {
        if (++nodes > budget) throw SearchLimitError("initial schedule construction exceeded its node budget");
        auto const& a = inst.activities[order[depth]];
        if (choice[depth] >= 0) {
            rooms.add(a, opts[depth][choice[depth]], -1);
            s.activities[a.id].reset();
        }
        int c = choice[depth] + 1;
        while (c < int(opts[depth].size()) && !rooms.fits(a, opts[depth][c])) ++c;
        if (c >= int(opts[depth].size())) {
            choice[depth] = -1;
            --depth;
            continue;
        }
        choice[depth] = c;
        rooms.add(a, opts[depth][c]);
        s.activities[a.id] = opts[depth][c];
        if (++depth < n) {
            opts[depth] = options_for(depth);
            choice[depth] = -1;
        }
    }
    return depth == n;
}

}  // namespace detail

struct ConstructOptions {
    bool even_starts_only = false;
    long node_budget = 5'000'000;
};

/// Feasible schedule of the recurring activities only: precedence order,
/// earliest admissible start, lowest-id building with room, backtracking
/// when stuck. Once-offs stay unscheduled and batteries hold.
inline Schedule construct_initial(Instance const& inst, ConstructOptions opt = {}) {
    validate(inst);
    Schedule s = Schedule::empty(inst);
    detail::RoomLedger rooms(inst);
    int B = int(inst.buildings.size());
    auto candidates = [&](int id) {
        std::vector<Placement> out;
        for (int start : admissible_starts(inst, inst.activities[id]))
            if (!opt.even_starts_only || start % 2 == 0)
                for (int b = 0; b < B; ++b) out.push_back({start, b});
        return out;
    };
    if (!detail::place_recurring(inst, s, rooms, candidates, opt.node_budget))
        throw InfeasibleError("no feasible placement of the recurring activities exists");
    return s;
}

struct RandomScheduleOptions {
    double onceoff_probability = 0.5;
    bool nonnegative_net_load = false;  // battery walk never pushes net load below zero
    int moves_per_activity = 20;        // random relocation attempts per recurring activity
    long node_budget = 5'000'000;
};

/// Random feasible schedule: the constructive schedule with its recurring
/// activities relocated by random feasible moves, each once-off tried with the
/// given probability at a random feasible spot, and a random SoC-feasible
/// battery walk.
template <class Rng>
Schedule random_feasible_schedule(Instance const& inst, Rng& rng, RandomScheduleOptions opt = {}) {
    ConstructOptions copt;
    copt.node_budget = opt.node_budget;
    Schedule s = construct_initial(inst, copt);
    detail::RoomLedger rooms(inst);
    for (auto const& a : inst.activities)
        if (s.activities[a.id]) rooms.add(a, *s.activities[a.id]);
    int B = int(inst.buildings.size());
    auto succ = successors(inst);
    auto shuffled = [&](int id, bool prune) {
        std::vector<Placement> out;
        for (int start : admissible_starts(inst, inst.activities[id], prune))
            for (int b = 0; b < B; ++b) out.push_back({start, b});
        std::shuffle(out.begin(), out.end(), rng);
        return out;
    };

    auto recurring = inst.ids_of(ActivityKind::recurring);
    std::vector<std::vector<int>> starts(inst.activities.size());
    for (int id : recurring) starts[id] = admissible_starts(inst, inst.activities[id]);
    long moves = long(opt.moves_per_activity) * long(recurring.size());
    for (long k = 0; k < moves; ++k) {
        int id = recurring[std::uniform_int_distribution<std::size_t>(0, recurring.size() - 1)(rng)];
        auto const& a = inst.activities[id];
        auto const& st = starts[id];
        Placement p{st[std::uniform_int_distribution<std::size_t>(0, st.size() - 1)(rng)],
                    std::uniform_int_distribution<int>(0, B - 1)(rng)};
        int day = precedence_day(inst.grid, p);
        bool ok = true;
        for (int pre : a.prerequisites) ok = ok && precedence_day(inst.grid, *s.activities[pre]) < day;
        for (int q : succ[id]) ok = ok && day < precedence_day(inst.grid, *s.activities[q]);
        if (!ok) continue;
        rooms.add(a, *s.activities[id], -1);
        if (rooms.fits(a, p)) s.activities[id] = p;
        rooms.add(a, *s.activities[id]);
    }

    std::bernoulli_distribution include(opt.onceoff_probability);
    for (int id : topological_order(inst)) {
        auto const& a = inst.activities[id];
        if (a.recurring() || !include(rng)) continue;
        bool ready = true;
        int min_day = 0;
        for (int pre : a.prerequisites) {
            if (!s.activities[pre]) ready = false;
            else min_day = std::max(min_day, precedence_day(inst.grid, *s.activities[pre]) + 1);
        }
        if (!ready) continue;
        for (auto const& p : shuffled(id, false))
            if (precedence_day(inst.grid, p) >= min_day && rooms.fits(a, p)) {
                rooms.add(a, p);
                s.activities[id] = p;
                break;
            }
    }

    if (!inst.batteries.empty()) {
        BatteryLattice lat(inst.batteries);
        auto act = activity_load_profile(inst, s);
        int state = lat.initial_state();
        int T = inst.grid.total_slots();
        std::vector<int> ok;
        for (int t = 0; t < T; ++t) {
            ok.clear();
            for (int c = 0; c < int(lat.combos().size()); ++c) {
                if (lat.next(state, lat.combos()[c]) < 0) continue;
                double l = (inst.net_base_load[t] + lat.combos()[c].grid) + act[t];
                if (opt.nonnegative_net_load && l < 0 && c != 0) continue;
                ok.push_back(c);
            }
            int c = ok[std::uniform_int_distribution<int>(0, int(ok.size()) - 1)(rng)];
            auto const& combo = lat.combos()[c];
            for (std::size_t b = 0; b < inst.batteries.size(); ++b) s.batteries[b][t] = combo.actions[b];
            state = lat.next(state, combo);
        }
    }
    return s;
}

}  // namespace predopt::heuristics
