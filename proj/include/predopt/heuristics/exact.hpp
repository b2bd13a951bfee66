#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/windows.hpp"
#include "predopt/heuristics/battery.hpp"
#include "predopt/heuristics/objective.hpp"
#include "predopt/heuristics/precedence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace predopt::heuristics {

struct ExactOptions {
    double leaf_cap = 1e7;     // refuse when the estimated leaf count is larger
    long node_budget = 0;      // 0 = unlimited
    double time_limit = 0.0;   // seconds, 0 = unlimited
    /// Per activity: unset = free, set = forced to the given placement (or to
    /// unscheduled). Empty means everything is free.
    std::vector<std::optional<std::optional<Placement>>> fixed_activities;
    std::optional<std::vector<std::vector<BatteryAction>>> fixed_batteries;
    /// Known feasible schedule consistent with the fixings; seeds the bound.
    std::optional<Schedule> incumbent;
};

/// After-hours starts of an unprofitable once-off can be dropped without
/// losing the optimum when they can only add cost: prices are nonnegative
/// and no other activity depends on it.
inline bool after_hours_prune_is_safe(Instance const& inst, Activity const& a,
                                      std::vector<std::vector<int>> const& succ) {
    if (a.recurring() || !succ[a.id].empty()) return false;
    return std::all_of(inst.price.begin(), inst.price.end(), [](double p) { return p >= 0.0; });
}

namespace detail {

class ExactSearch {
public:
    ExactSearch(Instance const& inst, Objective const& obj, ExactOptions const& opt)
        : inst_(inst), obj_(obj), opt_(opt), bases_(obj.bases(inst)), lattice_(inst.batteries), clock_(opt.time_limit) {
        T_ = inst.grid.total_slots();
        B_ = int(inst.buildings.size());
        K_ = int(bases_.size());
        if (!opt.fixed_activities.empty() && opt.fixed_activities.size() != inst.activities.size())
            throw std::invalid_argument("fixed activity list length differs from instance");
        if (opt.fixed_batteries) {
            Schedule probe = Schedule::empty(inst);
            probe.batteries = *opt.fixed_batteries;
            check_structure(inst, probe);
        }
        build_options();
        build_relaxation();
    }

    double leaf_estimate() const {
        double leaves = 1.0;
        for (auto const& o : options_) leaves *= double(o.size());
        return leaves * battery_walks();
    }

    SolveReport run() {
        chosen_.assign(inst_.activities.size(), std::nullopt);
        act_.assign(T_, 0.0);
        small_.assign(std::size_t(B_) * T_, 0);
        large_.assign(std::size_t(B_) * T_, 0);
        if (opt_.incumbent) {
            auto const& s = *opt_.incumbent;
            if (!check_feasibility(inst_, s).empty()) throw InfeasibleError("incumbent schedule is infeasible");
            best_ = s;
            best_cost_ = obj_(inst_, s);
        }
        activity_level(0, 0.0, 0.0);
        if (!best_) throw InfeasibleError("no feasible schedule exists");
        SolveReport r;
        r.schedule = *best_;
        r.objective = obj_(inst_, r.schedule);
        r.initial_objective = r.objective;
        r.trace = {r.objective};
        r.termination = stopped_ ? Termination::budget : Termination::optimal;
        r.evaluations = leaves_;
        r.iterations = int(std::min<long>(nodes_, std::numeric_limits<int>::max()));
        r.wall_seconds = clock_.elapsed();
        return r;
    }

private:
    struct Option {
        std::optional<Placement> placement;
        std::vector<int> slots;
        double energy = 0.0;  // $ of the activity's own load
        double profit = 0.0;
    };

    void build_options() {
        auto succ = successors(inst_);
        order_ = topological_order(inst_);
        int n = int(order_.size());
        options_.resize(n);
        double scale = TimeGrid::kHoursPerSlot / 1000.0;
        for (int i = 0; i < n; ++i) {
            auto const& a = inst_.activities[order_[i]];
            auto& opts = options_[i];
            auto make = [&](std::optional<Placement> p) {
                Option o{p, {}, 0.0, 0.0};
                if (p) {
                    for (auto iv : occurrence_slots(inst_.grid, a, *p))
                        for (int t = iv.begin; t < iv.end; ++t) o.slots.push_back(t);
                    for (int t : o.slots) o.energy += inst_.price[t] * a.load() * scale;
                    if (!a.recurring()) o.profit = is_after_hours(inst_.grid, a, *p) ? a.value - a.penalty : a.value;
                }
                return o;
            };
            if (!opt_.fixed_activities.empty() && opt_.fixed_activities[a.id]) {
                auto const& f = *opt_.fixed_activities[a.id];
                if (!f && a.recurring())
                    throw InfeasibleError("recurring activity " + std::to_string(a.id) + " is fixed unscheduled");
                opts.push_back(make(f));
                continue;
            }
            bool prune = after_hours_prune_is_safe(inst_, a, succ);
            for (int s : admissible_starts(inst_, a, prune))
                for (int b = 0; b < B_; ++b) opts.push_back(make(Placement{s, b}));
            if (!a.recurring()) opts.push_back(make(std::nullopt));
            if (opts.empty())
                throw InfeasibleError("recurring activity " + std::to_string(a.id) + " has no admissible start");
        }
        // Cheapest possible contribution of every activity still to be placed.
        suffix_delta_.assign(n + 1, 0.0);
        for (int i = n - 1; i >= 0; --i) {
            double m = std::numeric_limits<double>::infinity();
            for (auto const& o : options_[i]) m = std::min(m, o.energy - o.profit);
            suffix_delta_[i] = suffix_delta_[i + 1] + m;
        }
    }

    void build_relaxation() {
        double scale = TimeGrid::kHoursPerSlot / 1000.0;
        relax_peak_.assign(T_, 0.0);
        relax_energy_.assign(T_, 0.0);
        if (opt_.fixed_batteries) {
            Schedule probe = Schedule::empty(inst_);
            probe.batteries = *opt_.fixed_batteries;
            fixed_grid_ = battery_load_profile(inst_, probe);
            relax_peak_ = fixed_grid_;
            for (int t = 0; t < T_; ++t) relax_energy_[t] = inst_.price[t] * fixed_grid_[t];
        } else {
            double gmin = lattice_.min_grid();
            for (int t = 0; t < T_; ++t) {
                relax_peak_[t] = gmin;
                double e = std::numeric_limits<double>::infinity();
                for (auto const& c : lattice_.combos()) e = std::min(e, inst_.price[t] * c.grid);
                relax_energy_[t] = e;
            }
        }
        base_energy_.assign(K_, 0.0);
        for (int k = 0; k < K_; ++k) {
            double e = 0.0;
            for (int t = 0; t < T_; ++t) e += inst_.price[t] * bases_[k][t] + relax_energy_[t];
            base_energy_[k] = e * scale;
        }
    }

    double battery_walks() const {
        if (opt_.fixed_batteries) return 1.0;
        int S = lattice_.states();
        std::vector<double> cur(S, 0.0), nxt(S);
        cur[lattice_.initial_state()] = 1.0;
        for (int t = 0; t < T_; ++t) {
            std::fill(nxt.begin(), nxt.end(), 0.0);
            for (int s = 0; s < S; ++s)
                if (cur[s] > 0)
                    for (auto const& c : lattice_.combos()) {
                        int n = lattice_.next(s, c);
                        if (n >= 0) nxt[n] += cur[s];
                    }
            std::swap(cur, nxt);
        }
        double total = 0.0;
        for (double v : cur) total += v;
        return total;
    }

    double aggregate(std::vector<double> const& per_base) const {
        if (obj_.mode == ObjectiveMode::worst_case) return *std::max_element(per_base.begin(), per_base.end());
        double s = 0.0;
        for (double v : per_base) s += v;
        return s / double(per_base.size());
    }

    static double demand(double peak) {
        double billed = std::max(0.0, peak);
        return kDemandCoefficient * billed * billed;
    }

    bool prunable(double lb) const {
        return best_ && lb - 1e-9 * (1.0 + std::abs(best_cost_)) >= best_cost_;
    }

    bool out_of_budget() {
        ++nodes_;
        if (opt_.node_budget > 0 && nodes_ > opt_.node_budget) stopped_ = true;
        if ((nodes_ & 1023) == 0 && clock_.expired()) stopped_ = true;
        return stopped_;
    }

    double activity_bound(int i, double energy, double profit) {
        std::vector<double> per(K_);
        for (int k = 0; k < K_; ++k) {
            double peak = -std::numeric_limits<double>::infinity();
            for (int t = 0; t < T_; ++t) peak = std::max(peak, bases_[k][t] + act_[t] + relax_peak_[t]);
            per[k] = base_energy_[k] + demand(peak);
        }
        return aggregate(per) + energy - profit + suffix_delta_[i];
    }

    bool placeable(Activity const& a, Option const& o) const {
        if (!o.placement) return true;
        for (int pre : a.prerequisites) {
            auto const& q = chosen_[pre];
            if (!q || precedence_day(inst_.grid, *q) >= precedence_day(inst_.grid, *o.placement)) return false;
        }
        int b = o.placement->building;
        auto const& bd = inst_.buildings[b];
        for (int t : o.slots) {
            std::size_t k = std::size_t(b) * T_ + t;
            if (small_[k] + a.small_rooms > bd.small_rooms || large_[k] + a.large_rooms > bd.large_rooms) return false;
        }
        return true;
    }

    void apply(Activity const& a, Option const& o, int sign) {
        if (!o.placement) return;
        std::size_t base = std::size_t(o.placement->building) * T_;
        double kw = a.load();
        for (int t : o.slots) {
            small_[base + t] += sign * a.small_rooms;
            large_[base + t] += sign * a.large_rooms;
            act_[t] += sign * kw;
        }
    }

    void activity_level(int i, double energy, double profit) {
        if (out_of_budget()) return;
        if (i == int(order_.size())) {
            battery_phase();
            return;
        }
        if (prunable(activity_bound(i, energy, profit))) return;
        auto const& a = inst_.activities[order_[i]];
        std::vector<double> saved_act;
        for (auto const& o : options_[i]) {
            if (stopped_) return;
            if (!placeable(a, o)) continue;
            // Restore the float sums exactly instead of subtracting.
            saved_act = act_;
            apply(a, o, +1);
            chosen_[a.id] = o.placement;
            activity_level(i + 1, energy + o.energy, profit + o.profit);
            chosen_[a.id] = std::nullopt;
            apply(a, o, -1);
            act_ = saved_act;
        }
    }

    void battery_phase() {
        leaf_ = Schedule::empty(inst_);
        leaf_.activities = chosen_;
        exact_act_ = activity_load_profile(inst_, leaf_);
        leaf_profit_ = onceoff_profit(inst_, leaf_);
        if (opt_.fixed_batteries) {
            leaf_.batteries = *opt_.fixed_batteries;
            if (!check_feasibility(inst_, leaf_).empty()) return;
            evaluate_leaf(fixed_grid_);
            return;
        }
        // Suffix bounds with the battery relaxed from slot t on.
        suf_energy_.assign(std::size_t(K_) * (T_ + 1), 0.0);
        suf_peak_.assign(std::size_t(K_) * (T_ + 1), -std::numeric_limits<double>::infinity());
        for (int k = 0; k < K_; ++k)
            for (int t = T_ - 1; t >= 0; --t) {
                double l = bases_[k][t] + exact_act_[t];
                suf_energy_[k * (T_ + 1) + t] = suf_energy_[k * (T_ + 1) + t + 1] + inst_.price[t] * l + relax_energy_[t];
                suf_peak_[k * (T_ + 1) + t] = std::max(suf_peak_[k * (T_ + 1) + t + 1], l + relax_peak_[t]);
            }
        bat_.assign(T_, 0.0);
        part_energy_.assign(K_, 0.0);
        part_peak_.assign(K_, -std::numeric_limits<double>::infinity());
        battery_level(0, lattice_.initial_state());
    }

    void battery_level(int t, int state) {
        if (out_of_budget()) return;
        if (t == T_) {
            for (std::size_t b = 0; b < leaf_.batteries.size(); ++b)
                for (int u = 0; u < T_; ++u) leaf_.batteries[b][u] = actions_[u][b];
            evaluate_leaf(bat_);
            return;
        }
        double scale = TimeGrid::kHoursPerSlot / 1000.0;
        std::vector<double> per(K_);
        for (int k = 0; k < K_; ++k) {
            double e = (part_energy_[k] + suf_energy_[k * (T_ + 1) + t]) * scale;
            per[k] = e + demand(std::max(part_peak_[k], suf_peak_[k * (T_ + 1) + t]));
        }
        if (prunable(aggregate(per) - leaf_profit_)) return;
        if (int(actions_.size()) < T_) actions_.resize(T_);
        std::vector<double> saved_energy = part_energy_, saved_peak = part_peak_;
        for (auto const& c : lattice_.combos()) {
            if (stopped_) return;
            int next = lattice_.next(state, c);
            if (next < 0) continue;
            bat_[t] = c.grid;
            actions_[t] = c.actions;
            for (int k = 0; k < K_; ++k) {
                double l = (bases_[k][t] + c.grid) + exact_act_[t];
                part_energy_[k] = saved_energy[k] + inst_.price[t] * l;
                part_peak_[k] = std::max(saved_peak[k], l);
            }
            battery_level(t + 1, next);
        }
        part_energy_ = saved_energy;
        part_peak_ = saved_peak;
        bat_[t] = 0.0;
    }

    void evaluate_leaf(std::vector<double> const& bat) {
        ++leaves_;
        double cost = aggregate_grid_cost(obj_.mode, bases_, bat, exact_act_, inst_.price) - leaf_profit_;
        if (!best_ || cost < best_cost_) {
            best_cost_ = cost;
            best_ = leaf_;
        }
    }

    Instance const& inst_;
    Objective const& obj_;
    ExactOptions const& opt_;
    std::vector<std::span<double const>> bases_;
    BatteryLattice lattice_;
    Stopwatch clock_;
    int T_ = 0, B_ = 0, K_ = 0;

    std::vector<int> order_;
    std::vector<std::vector<Option>> options_;
    std::vector<double> suffix_delta_;
    std::vector<double> relax_peak_, relax_energy_, base_energy_, fixed_grid_;

    std::vector<std::optional<Placement>> chosen_;
    std::vector<double> act_;
    std::vector<int> small_, large_;

    Schedule leaf_;
    std::vector<double> exact_act_, bat_, suf_energy_, suf_peak_, part_energy_, part_peak_;
    std::vector<std::vector<BatteryAction>> actions_;
    double leaf_profit_ = 0.0;

    std::optional<Schedule> best_;
    double best_cost_ = std::numeric_limits<double>::infinity();
    long nodes_ = 0, leaves_ = 0;
    bool stopped_ = false;
};

}  // namespace detail

/// Number of leaves a full enumeration would visit: start/building/omit
/// choices per activity times SoC-feasible battery walks.
inline double exact_leaf_estimate(Instance const& inst, Objective const& obj = {}, ExactOptions const& opt = {}) {
    return detail::ExactSearch(inst, obj, opt).leaf_estimate();
}

/// Provably optimal schedule by depth-first enumeration with incumbent
/// pruning. Activities are branched in precedence order over admissible
/// starts and buildings (plus omission for once-offs), then battery actions
/// slot by slot, hold first. Throws SearchLimitError above `leaf_cap` leaves
/// and InfeasibleError when nothing feasible exists. When the node or time
/// budget runs out the best schedule so far is returned with termination
/// `budget`.
inline SolveReport solve_exact(Instance const& inst, Objective const& obj = {}, ExactOptions const& opt = {}) {
    validate(inst);
    detail::ExactSearch search(inst, obj, opt);
    double leaves = search.leaf_estimate();
    if (leaves > opt.leaf_cap)
        throw SearchLimitError("exact search space of " + std::to_string(leaves) + " leaves exceeds the cap of " +
                               std::to_string(opt.leaf_cap));
    return search.run();
}

}  // namespace predopt::heuristics
