#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/evaluator.hpp"

#include <chrono>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace predopt::heuristics {

enum class ObjectiveMode { deterministic, average, worst_case };

inline char const* to_string(ObjectiveMode m) {
    switch (m) {
        case ObjectiveMode::deterministic: return "det";
        case ObjectiveMode::average: return "avg";
        case ObjectiveMode::worst_case: return "worst";
    }
    return "?";
}

/// What the solvers minimise: the evaluator's objective on the instance's own
/// net base load, or its scenario aggregate.
struct Objective {
    ObjectiveMode mode = ObjectiveMode::deterministic;
    std::vector<std::vector<double>> scenarios;

    static Objective deterministic() { return {}; }

    static Objective saa(std::vector<std::vector<double>> scenarios, ObjectiveMode mode) {
        if (mode == ObjectiveMode::deterministic) throw std::invalid_argument("scenario objective needs avg or worst mode");
        if (scenarios.empty()) throw std::invalid_argument("scenario set is empty");
        return {mode, std::move(scenarios)};
    }

    /// Net-base-load series the objective is evaluated on.
    std::vector<std::span<double const>> bases(Instance const& inst) const {
        if (mode == ObjectiveMode::deterministic) return {std::span<double const>(inst.net_base_load)};
        std::vector<std::span<double const>> out;
        for (auto const& sc : scenarios) {
            if (sc.size() != inst.net_base_load.size()) throw std::invalid_argument("scenario length differs from grid");
            out.emplace_back(sc);
        }
        return out;
    }

    double operator()(Instance const& inst, Schedule const& s) const {
        if (mode == ObjectiveMode::deterministic) return objective_cost(inst, s).total;
        return saa_cost(inst, s, scenarios, mode == ObjectiveMode::average ? SaaMode::average : SaaMode::worst_case);
    }
};

/// Grid part of the objective from load components, aggregated over bases
/// exactly as saa_cost does. `with_demand = false` drops the peak term.
inline double aggregate_grid_cost(ObjectiveMode mode, std::vector<std::span<double const>> const& bases,
                                  std::span<double const> battery, std::span<double const> activity,
                                  std::span<double const> price, bool with_demand = true) {
    detail::StableSum sum;
    double worst = -std::numeric_limits<double>::infinity();
    for (auto const& base : bases) {
        auto g = grid_charges(base, battery, activity, price);
        double c = with_demand ? g.total() : g.energy_cost;
        sum.add(c);
        worst = std::max(worst, c);
    }
    switch (mode) {
        case ObjectiveMode::deterministic: return sum.value();
        case ObjectiveMode::average: return sum.value() / double(bases.size());
        case ObjectiveMode::worst_case: return worst;
    }
    return sum.value();
}

/// Highest net load over all bases.
inline double max_net_load(std::vector<std::span<double const>> const& bases, std::span<double const> battery,
                           std::span<double const> activity) {
    double peak = -std::numeric_limits<double>::infinity();
    for (auto const& base : bases)
        for (std::size_t t = 0; t < base.size(); ++t) peak = std::max(peak, (base[t] + battery[t]) + activity[t]);
    return peak;
}

enum class Termination { optimal, max_iter, patience, budget, converged };

inline char const* to_string(Termination t) {
    switch (t) {
        case Termination::optimal: return "optimal";
        case Termination::max_iter: return "max_iter";
        case Termination::patience: return "patience";
        case Termination::budget: return "budget";
        case Termination::converged: return "converged";
    }
    return "?";
}

struct SolveReport {
    Schedule schedule;
    double objective = 0.0;       // v*, recomputed by the evaluator
    double initial_objective = 0.0;
    std::vector<double> trace;    // best objective after each iteration / accepted step
    double wall_seconds = 0.0;
    Termination termination = Termination::converged;
    long evaluations = 0;
    int iterations = 0;
    double peak_cap = std::numeric_limits<double>::infinity();  // two-stage only
    double peak_lower_bound = 0.0;                              // two-stage only
};

/// Wall clock with an optional limit; zero seconds means unlimited.
class Stopwatch {
public:
    explicit Stopwatch(double limit_seconds = 0.0) : limit_(limit_seconds), start_(std::chrono::steady_clock::now()) {}

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    bool expired() const { return limit_ > 0.0 && elapsed() >= limit_; }

private:
    double limit_;
    std::chrono::steady_clock::time_point start_;
};

/// Throws InfeasibleError listing the first violations when `s` is infeasible.
inline void require_feasible(Instance const& inst, Schedule const& s, char const* what) {
    auto v = check_feasibility(inst, s);
    if (v.empty()) return;
    std::string msg = std::string(what) + " is infeasible: " + describe(v.front());
    if (v.size() > 1) msg += " (+" + std::to_string(v.size() - 1) + " more)";
    throw InfeasibleError(msg);
}

}  // namespace predopt::heuristics
