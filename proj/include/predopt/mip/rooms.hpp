#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/evaluator.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace predopt::mip {

struct RoomAssignmentOptions {
    long node_budget = 2'000'000;
};

/// Spreads the scheduled activities over buildings so that, at every
/// occupied slot, each building's small and large rooms suffice. Building ids
/// in the input are ignored. Activities are placed largest first, trying the
/// tightest building that fits, with chronological backtracking.
inline Schedule assign_rooms(Instance const& inst, Schedule s, RoomAssignmentOptions opt = {}) {
    check_structure(inst, s);
    int T = inst.grid.total_slots();
    int B = int(inst.buildings.size());

    struct Item {
        int id;
        std::vector<int> slots;
    };
    std::vector<Item> items;
    for (auto const& a : inst.activities) {
        auto const& p = s.activities[a.id];
        if (!p) continue;
        Item it{a.id, {}};
        for (auto iv : occurrence_slots(inst.grid, a, {p->start, 0}))
            for (int t = iv.begin; t < iv.end; ++t) it.slots.push_back(t);
        if (!it.slots.empty()) items.push_back(std::move(it));
        if (B == 0) throw InfeasibleError("no buildings to host activity " + std::to_string(a.id));
    }
    std::stable_sort(items.begin(), items.end(), [&](Item const& x, Item const& y) {
        auto const& a = inst.activities[x.id];
        auto const& b = inst.activities[y.id];
        if (a.rooms() != b.rooms()) return a.rooms() > b.rooms();
        if (x.slots.size() != y.slots.size()) return x.slots.size() > y.slots.size();
        return x.slots.front() < y.slots.front();
    });

    std::vector<int> small(std::size_t(B) * T, 0), large(std::size_t(B) * T, 0);
    auto fits = [&](Item const& it, int b) {
        auto const& a = inst.activities[it.id];
        auto const& bd = inst.buildings[b];
        for (int t : it.slots) {
            std::size_t k = std::size_t(b) * T + t;
            if (small[k] + a.small_rooms > bd.small_rooms || large[k] + a.large_rooms > bd.large_rooms) return false;
        }
        return true;
    };
    auto apply = [&](Item const& it, int b, int sign) {
        auto const& a = inst.activities[it.id];
        for (int t : it.slots) {
            std::size_t k = std::size_t(b) * T + t;
            small[k] += sign * a.small_rooms;
            large[k] += sign * a.large_rooms;
        }
    };
    // Spare capacity left at the activity's busiest slot; smaller is tighter.
    auto slack = [&](Item const& it, int b) {
        auto const& a = inst.activities[it.id];
        auto const& bd = inst.buildings[b];
        int best = std::numeric_limits<int>::max();
        for (int t : it.slots) {
            std::size_t k = std::size_t(b) * T + t;
            best = std::min(best, (bd.small_rooms - small[k] - a.small_rooms) + (bd.large_rooms - large[k] - a.large_rooms));
        }
        return best;
    };

    int n = int(items.size());
    std::vector<std::vector<int>> options(n);
    std::vector<int> choice(n, -1);
    long nodes = 0;
    int fail_depth = -1, fail_item = -1, fail_slot = -1;
    // First slot at which no building has room for the item right now.
    auto blocking_slot = [&](Item const& it) {
        auto const& a = inst.activities[it.id];
        for (int t : it.slots) {
            bool somewhere = false;
            for (int b = 0; b < B && !somewhere; ++b) {
                std::size_t k = std::size_t(b) * T + t;
                somewhere = small[k] + a.small_rooms <= inst.buildings[b].small_rooms &&
                            large[k] + a.large_rooms <= inst.buildings[b].large_rooms;
            }
            if (!somewhere) return t;
        }
        return it.slots.front();
    };
    auto candidates = [&](int i) {
        std::vector<int> out;
        for (int b = 0; b < B; ++b)
            if (fits(items[i], b)) out.push_back(b);
        std::stable_sort(out.begin(), out.end(), [&](int x, int y) { return slack(items[i], x) < slack(items[i], y); });
        if (out.empty() && i > fail_depth) {
            fail_depth = i;
            fail_item = items[i].id;
            fail_slot = blocking_slot(items[i]);
        }
        return out;
    };
    int depth = 0;
    if (n > 0) options[0] = candidates(0);
    while (depth >= 0 && depth < n) {
        if (++nodes > opt.node_budget) throw SearchLimitError("room assignment exceeded its node budget");
        auto& opts = options[depth];
        if (choice[depth] >= 0) apply(items[depth], opts[choice[depth]], -1);
        ++choice[depth];
        if (choice[depth] >= int(opts.size())) {
            choice[depth] = -1;
            --depth;
            continue;
        }
        apply(items[depth], opts[choice[depth]], +1);
        ++depth;
        if (depth < n) {
            options[depth] = candidates(depth);
            choice[depth] = -1;
        }
    }
    if (depth < 0)
        throw InfeasibleError("no single building can host activity " + std::to_string(fail_item) + " at slot " +
                              std::to_string(fail_slot));
    for (int i = 0; i < n; ++i) s.activities[items[i].id]->building = options[i][choice[i]];
    return s;
}

}  // namespace predopt::mip
