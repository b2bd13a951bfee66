#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/heuristics/battery.hpp"
#include "predopt/heuristics/exact.hpp"
#include "predopt/heuristics/local_search.hpp"
#include "predopt/heuristics/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace predopt::heuristics {

struct FixOptParams {
    int r_count = 10;             // recurring activities freed per iteration
    int a_count = 5;              // once-off activities freed per iteration
    int max_iter = 150;
    int patience = 15;
    double tol = 1e-5;            // relative improvement needed to accept
    long effort = 3'000;          // candidate moves per local sub-solve
    double exhaustive_cap = 2e4;  // sub-problems with at most this many leaves are enumerated
    double time_limit = 0.0;      // seconds, 0 = unlimited
    bool reoptimize_battery = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (r_count < 0 || a_count < 0) throw std::invalid_argument("sample counts must be nonnegative");
        if (r_count == 0 && a_count == 0) throw std::invalid_argument("at least one activity must be sampled");
        if (max_iter < 0 || patience < 0) throw std::invalid_argument("max_iter and patience must be nonnegative");
        if (!(tol >= 0)) throw std::invalid_argument("tol must be nonnegative");
        if (effort < 0) throw std::invalid_argument("effort must be nonnegative");
    }
};

/// Relative-improvement acceptance rule. A zero incumbent accepts any
/// strict decrease.
inline bool accept_improvement(double incumbent, double candidate, double tol) {
    if (!(candidate < incumbent)) return false;
    if (incumbent == 0.0) return true;
    return (incumbent - candidate) / std::abs(incumbent) >= tol;
}

/// Large neighbourhood search: each iteration frees a random sample of
/// recurring and once-off activities, re-optimises them with everything else
/// fixed (exhaustively when the sub-problem is small, by restricted local
/// search otherwise), re-plans the batteries, and keeps the result only when
/// it improves the incumbent by at least `tol` relative. Stops after
/// `max_iter` iterations or `patience` consecutive rejections.
inline SolveReport fix_and_optimize(Instance const& inst, Schedule const& init, FixOptParams const& params,
                                    Objective const& obj = {}) {
    params.validate();
    require_feasible(inst, init, "initial schedule");
    Stopwatch clock(params.time_limit);
    std::mt19937_64 rng(params.seed);

    auto recurring = inst.ids_of(ActivityKind::recurring);
    auto onceoff = inst.ids_of(ActivityKind::once_off);

    SolveReport r;
    r.schedule = init;
    r.initial_objective = obj(inst, init);
    r.objective = r.initial_objective;
    r.trace = {r.objective};

    int iter = 1, count = 0;
    r.termination = Termination::max_iter;
    while (iter <= params.max_iter && count <= params.patience) {
        if (clock.expired()) {
            r.termination = Termination::budget;
            break;
        }
        std::vector<int> picked;
        std::sample(recurring.begin(), recurring.end(), std::back_inserter(picked), params.r_count, rng);
        std::sample(onceoff.begin(), onceoff.end(), std::back_inserter(picked), params.a_count, rng);
        std::vector<char> free(inst.activities.size(), 0);
        for (int id : picked) free[id] = 1;

        ExactOptions ex;
        ex.fixed_activities.resize(inst.activities.size());
        for (auto const& a : inst.activities)
            if (!free[a.id]) ex.fixed_activities[a.id] = r.schedule.activities[a.id];
        ex.fixed_batteries = r.schedule.batteries;
        ex.incumbent = r.schedule;

        Schedule cand;
        if (exact_leaf_estimate(inst, obj, ex) <= params.exhaustive_cap) {
            cand = solve_exact(inst, obj, ex).schedule;
        } else {
            LocalSearchParams lp;
            lp.max_evaluations = params.effort;
            lp.stall_limit = params.effort;
            lp.free = free;
            lp.battery_moves = false;
            cand = local_search(inst, r.schedule, lp, rng, obj).schedule;
        }
        if (params.reoptimize_battery && !inst.batteries.empty()) cand = optimize_battery_total(inst, cand, obj);
        r.evaluations += 1;

        double v = obj(inst, cand);
        if (accept_improvement(r.objective, v, params.tol) && check_feasibility(inst, cand).empty()) {
            r.schedule = std::move(cand);
            r.objective = v;
            count = 0;
        } else {
            ++count;
        }
        r.trace.push_back(r.objective);
        r.iterations = iter;
        ++iter;
    }
    if (r.termination != Termination::budget)
        r.termination = iter > params.max_iter ? Termination::max_iter : Termination::patience;
    r.wall_seconds = clock.elapsed();
    return r;
}

}  // namespace predopt::heuristics
