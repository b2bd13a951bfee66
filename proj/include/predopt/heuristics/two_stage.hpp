#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/windows.hpp"
#include "predopt/heuristics/battery.hpp"
#include "predopt/heuristics/construct.hpp"
#include "predopt/heuristics/local_search.hpp"
#include "predopt/heuristics/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace predopt::heuristics {

struct TwoStageParams {
    double alpha = 1.10;
    long effort = 20'000;     // candidate moves per stage
    double time_limit = 0.0;  // seconds per stage, 0 = unlimited
    std::uint64_t seed = 0;
};

/// No schedule can keep its highest net load below this: the worst slot of
/// base load with every battery discharging, and for each recurring activity
/// the cheapest (in peak terms) of its admissible starts.
inline double peak_lower_bound(Instance const& inst, Objective const& obj = {}) {
    auto bases = obj.bases(inst);
    int T = inst.grid.total_slots();
    double supply = 0.0;
    for (auto const& b : inst.batteries) supply += b.discharge_supply();
    std::vector<double> top(T, -std::numeric_limits<double>::infinity());
    for (auto const& base : bases)
        for (int t = 0; t < T; ++t) top[t] = std::max(top[t], base[t]);
    double bound = T > 0 ? *std::max_element(top.begin(), top.end()) : 0.0;
    for (auto const& a : inst.activities) {
        if (!a.recurring()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int s : admissible_starts(inst, a)) {
            double worst = -std::numeric_limits<double>::infinity();
            for (auto iv : occurrence_slots(inst.grid, a, {s, 0}))
                for (int t = iv.begin; t < iv.end; ++t) worst = std::max(worst, top[t] + a.load());
            best = std::min(best, worst);
        }
        if (std::isfinite(best)) bound = std::max(bound, best);
    }
    return bound - supply;
}

/// Peak-cap strategy. Stage 1 searches for a schedule with a low peak; stage
/// 2 minimises energy cost minus profit with every net load capped at
/// alpha times that peak, then re-plans the batteries under the cap. The
/// cheapest feasible schedule among the capped result, the constructive
/// start and an uncapped fallback is returned.
inline SolveReport two_stage_peak_cap(Instance const& inst, TwoStageParams const& params, Objective const& obj = {}) {
    if (!(params.alpha >= 1.0)) throw std::invalid_argument("alpha must be at least 1");
    Stopwatch clock;
    std::mt19937_64 rng(params.seed);
    Schedule init = construct_initial(inst);

    SolveReport r;
    r.initial_objective = obj(inst, init);
    r.peak_lower_bound = peak_lower_bound(inst, obj);

    LocalSearchParams s1;
    s1.goal = SearchGoal::peak;
    s1.max_evaluations = params.effort;
    s1.time_limit = params.time_limit;
    auto stage1 = local_search(inst, init, s1, rng, obj);
    auto bases = obj.bases(inst);
    auto peak_of = [&](Schedule const& s) {
        return max_net_load(bases, battery_load_profile(inst, s), activity_load_profile(inst, s));
    };
    double p1 = peak_of(stage1.schedule);
    double cap = std::isinf(params.alpha) ? std::numeric_limits<double>::infinity()
                                          : p1 + (params.alpha - 1.0) * std::abs(p1);
    r.peak_cap = cap;

    std::vector<Schedule> pool{init};
    try {
        LocalSearchParams s2;
        s2.goal = SearchGoal::energy_profit;
        s2.max_evaluations = params.effort;
        s2.time_limit = params.time_limit;
        if (std::isfinite(cap)) s2.peak_cap = cap;
        auto stage2 = local_search(inst, stage1.schedule, s2, rng, obj).schedule;
        pool.push_back(stage2);
        Schedule planned = stage2;
        planned.batteries = optimize_battery(inst, stage2, cap, obj);
        pool.push_back(std::move(planned));
        pool.push_back(optimize_battery_total(inst, stage2, obj));
    } catch (InfeasibleError const&) {
        LocalSearchParams fb;
        fb.max_evaluations = params.effort;
        fb.time_limit = params.time_limit;
        pool.push_back(local_search(inst, init, fb, rng, obj).schedule);
    }

    double best = std::numeric_limits<double>::infinity();
    for (auto& s : pool) {
        if (!check_feasibility(inst, s).empty()) continue;
        double v = obj(inst, s);
        if (v < best) {
            best = v;
            r.schedule = s;
        }
    }
    r.objective = best;
    r.trace = {r.initial_objective, best};
    r.evaluations = stage1.evaluations;
    r.termination = Termination::converged;
    r.wall_seconds = clock.elapsed();
    return r;
}

}  // namespace predopt::heuristics
