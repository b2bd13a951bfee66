#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/model.hpp"
#include "predopt/core/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace predopt::mip {

enum class VarKind { binary, integer, continuous };
enum class Sense { le, ge, eq };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lb = 0.0;
    double ub = kInf;
    bool relax_in_export = false;  // written as continuous, checked as integral

    friend bool operator==(Variable const&, Variable const&) = default;
};

struct Term {
    int var = 0;
    double coef = 0.0;

    friend bool operator==(Term const&, Term const&) = default;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;

    friend bool operator==(Constraint const&, Constraint const&) = default;
};

/// Entity handles into the variable list; -1 where a variable does not exist.
struct EntityMap {
    std::vector<std::vector<int>> z;       // [activity][start slot]
    std::vector<std::vector<int>> v;       // [activity][slot], first-week slot for recurring
    std::vector<std::vector<int>> starts;  // [activity] admissible starts, ascending
    std::vector<int> w, u, d;              // [activity]; u is -1 for recurring
    std::vector<std::vector<int>> x, y, s; // [battery][slot]
    std::vector<std::vector<int>> ell;     // [scenario][slot]
    std::vector<int> eta;                  // [scenario]
    std::vector<std::vector<int>> lambda;  // [scenario][level - 1]
};

/// Minimisation model over named variables with linear rows.
struct MipModel {
    std::string name = "predopt";
    std::vector<Variable> vars;
    std::vector<Constraint> rows;
    std::vector<Term> objective;
    double objective_constant = 0.0;

    int peak_bound = 0;       // M
    int day_sentinel = 0;     // day index of an unscheduled activity
    std::vector<std::vector<double>> base_loads;  // one net-base-load series per scenario
    EntityMap map;

    int add_var(std::string var_name, VarKind kind, double lb, double ub, bool relax = false) {
        auto [it, fresh] = index_.emplace(var_name, int(vars.size()));
        if (!fresh) throw std::invalid_argument("duplicate variable name '" + var_name + "'");
        vars.push_back({std::move(var_name), kind, lb, ub, relax});
        return it->second;
    }

    void add_row(std::string row_name, std::vector<Term> terms, Sense sense, double rhs) {
        rows.push_back({std::move(row_name), std::move(terms), sense, rhs});
    }

    int find(std::string const& var_name) const {
        auto it = index_.find(var_name);
        return it == index_.end() ? -1 : it->second;
    }

    void reindex() {
        index_.clear();
        for (int i = 0; i < int(vars.size()); ++i)
            if (!index_.emplace(vars[i].name, i).second)
                throw std::invalid_argument("duplicate variable name '" + vars[i].name + "'");
    }

    int count(VarKind kind) const {
        return int(std::count_if(vars.begin(), vars.end(), [&](Variable const& v) { return v.kind == kind; }));
    }

private:
    std::unordered_map<std::string, int> index_;
};

namespace detail {

inline std::string idx(std::string base, std::initializer_list<int> ids) {
    for (int i : ids) base += "_" + std::to_string(i);
    return base;
}

// Structural bound on |l_t| over every schedule: base plus each activity that
// could be running at t plus all batteries charging, or base minus all
// batteries discharging.
inline double load_bound(Instance const& inst, std::vector<double> const& base,
                         std::vector<std::vector<int>> const& starts) {
    int T = inst.grid.total_slots();
    std::vector<double> act(T, 0.0);
    std::vector<char> mark(T);
    for (auto const& a : inst.activities) {
        std::fill(mark.begin(), mark.end(), 0);
        for (int s : starts[a.id])
            for (auto iv : occurrence_slots(inst.grid, a, {s, 0}))
                for (int t = iv.begin; t < iv.end; ++t) mark[t] = 1;
        for (int t = 0; t < T; ++t)
            if (mark[t]) act[t] += a.load();
    }
    double charge = 0.0, discharge = 0.0;
    for (auto const& b : inst.batteries) {
        charge += b.charge_draw();
        discharge += b.discharge_supply();
    }
    double bound = 0.0;
    for (int t = 0; t < T; ++t)
        bound = std::max({bound, std::abs(base[t] + act[t] + charge), std::abs(base[t] - discharge)});
    return bound;
}

inline MipModel build_model(Instance const& inst, std::vector<std::vector<double>> const& scenarios, bool saa) {
    validate(inst);
    auto const& g = inst.grid;
    int T = g.total_slots();
    int D = g.steps_per_day();
    int W = g.week_slots();
    int off = g.first_monday_offset();
    int K = int(scenarios.size());
    int A = int(inst.activities.size());
    int NB = int(inst.batteries.size());

    bool any_office = false;
    for (int t = off; t < std::min(T, off + W) && !any_office; ++t) any_office = g.is_office_slot(t);
    if (!any_office) throw DomainError("grid has no office slots in the first week");

    MipModel m;
    m.base_loads = scenarios;
    m.day_sentinel = (T + 1 + D - 1) / D;
    auto& map = m.map;
    map.starts.resize(A);
    for (auto const& a : inst.activities) {
        map.starts[a.id] = admissible_starts(inst, a, true);
        if (a.recurring() && map.starts[a.id].empty())
            throw InfeasibleError("recurring activity " + std::to_string(a.id) + " has no admissible start");
    }
    double bound = 0.0;
    for (auto const& sc : scenarios) bound = std::max(bound, load_bound(inst, sc, map.starts));
    m.peak_bound = std::max(1, int(std::ceil(bound)));
    int M = m.peak_bound;

    // Variables.
    map.z.assign(A, {});
    map.v.assign(A, {});
    map.w.assign(A, -1);
    map.u.assign(A, -1);
    map.d.assign(A, -1);
    for (auto const& a : inst.activities) {
        int span = a.recurring() ? W : T;
        auto& z = map.z[a.id];
        auto& v = map.v[a.id];
        z.assign(span, -1);
        v.assign(span, -1);
        for (int s : map.starts[a.id]) z[s] = m.add_var(idx("z", {a.id, s}), VarKind::binary, 0, 1);
        for (int s : map.starts[a.id])
            for (int t = s; t < s + a.duration; ++t)
                if (v[t] < 0) v[t] = -2;
        for (int t = 0; t < span; ++t)
            if (v[t] == -2) v[t] = m.add_var(idx("v", {a.id, t}), VarKind::binary, 0, 1);
        map.w[a.id] = m.add_var(idx("w", {a.id}), VarKind::binary, 0, 1);
        if (!a.recurring()) map.u[a.id] = m.add_var(idx("u", {a.id}), VarKind::binary, 0, 1);
        map.d[a.id] = m.add_var(idx("d", {a.id}), VarKind::continuous, 0, m.day_sentinel);
    }
    map.x.assign(NB, std::vector<int>(T));
    map.y.assign(NB, std::vector<int>(T));
    map.s.assign(NB, std::vector<int>(T));
    for (int b = 0; b < NB; ++b)
        for (int t = 0; t < T; ++t) {
            map.x[b][t] = m.add_var(idx("x", {b, t}), VarKind::binary, 0, 1);
            map.y[b][t] = m.add_var(idx("y", {b, t}), VarKind::binary, 0, 1);
            map.s[b][t] = m.add_var(idx("s", {b, t}), VarKind::continuous, 0, inst.batteries[b].capacity);
        }
    map.ell.assign(K, std::vector<int>(T));
    map.eta.assign(K, -1);
    map.lambda.assign(K, std::vector<int>(M));
    for (int k = 0; k < K; ++k) {
        for (int t = 0; t < T; ++t)
            map.ell[k][t] = m.add_var(saa ? idx("ell", {k, t}) : idx("ell", {t}), VarKind::continuous, -kInf, kInf);
        map.eta[k] = m.add_var(saa ? idx("eta", {k}) : "eta", VarKind::continuous, 0, kInf);
        for (int i = 1; i <= M; ++i)
            map.lambda[k][i - 1] =
                m.add_var(saa ? idx("lambda", {k, i}) : idx("lambda", {i}), VarKind::binary, 0, 1, true);
    }

    // Objective.
    double per_scenario = 1.0 / double(K);
    for (int k = 0; k < K; ++k) {
        for (int t = 0; t < T; ++t)
            if (inst.price[t] != 0.0)
                m.objective.push_back({map.ell[k][t], TimeGrid::kHoursPerSlot / 1000.0 * inst.price[t] * per_scenario});
        for (int i = 1; i <= M; ++i)
            m.objective.push_back({map.lambda[k][i - 1], 0.005 * double(i) * double(i) * per_scenario});
    }
    for (auto const& a : inst.activities) {
        if (a.recurring()) continue;
        if (a.value != 0.0) m.objective.push_back({map.w[a.id], -a.value});
        if (a.penalty != 0.0) m.objective.push_back({map.u[a.id], a.penalty});
    }

    // Activity rows.
    for (auto const& a : inst.activities) {
        auto const& z = map.z[a.id];
        auto const& v = map.v[a.id];
        int span = int(z.size());
        for (int t = 0; t < span; ++t) {
            if (v[t] < 0) continue;
            std::vector<Term> terms;
            for (int s = std::max(0, t - a.duration + 1); s <= t; ++s)
                if (z[s] >= 0) terms.push_back({z[s], 1.0});
            terms.push_back({v[t], -1.0});
            m.add_row(idx("in_progress", {a.id, t}), std::move(terms), Sense::eq, 0.0);
        }
        std::vector<Term> dur, one, late, day;
        for (int t = 0; t < span; ++t)
            if (v[t] >= 0) dur.push_back({v[t], 1.0});
        dur.push_back({map.w[a.id], -double(a.duration)});
        m.add_row(idx("duration", {a.id}), std::move(dur), Sense::eq, 0.0);
        for (int s : map.starts[a.id]) {
            one.push_back({z[s], 1.0});
            if (int dd = s / D; dd != 0) day.push_back({z[s], double(dd)});
            if (!a.recurring() && onceoff_after_hours(g, s, a.duration)) late.push_back({z[s], 1.0});
        }
        one.push_back({map.w[a.id], -1.0});
        m.add_row(idx("one_start", {a.id}), std::move(one), Sense::eq, 0.0);
        if (!a.recurring()) {
            late.push_back({map.u[a.id], -1.0});
            m.add_row(idx("after_hours", {a.id}), std::move(late), Sense::eq, 0.0);
        }
        day.push_back({map.w[a.id], -double(m.day_sentinel)});
        day.push_back({map.d[a.id], -1.0});
        m.add_row(idx("start_day", {a.id}), std::move(day), Sense::eq, -double(m.day_sentinel));
    }
    for (auto const& a : inst.activities)
        for (int p : a.prerequisites) {
            m.add_row(idx("precedence", {p, a.id}), {{map.d[p], 1.0}, {map.w[p], 1.0}, {map.d[a.id], -1.0}},
                      Sense::le, 0.0);
            m.add_row(idx("prereq_scheduled", {p, a.id}), {{map.w[a.id], 1.0}, {map.w[p], -1.0}}, Sense::le, 0.0);
        }
    for (auto const& a : inst.activities)
        if (a.recurring()) m.add_row(idx("recurring", {a.id}), {{map.w[a.id], 1.0}}, Sense::eq, 1.0);

    // Batteries.
    for (int b = 0; b < NB; ++b) {
        auto const& bat = inst.batteries[b];
        double step = bat.step_energy();
        for (int t = 0; t < T; ++t) {
            std::vector<Term> terms{{map.s[b][t], 1.0}, {map.x[b][t], -step}, {map.y[b][t], step}};
            if (t > 0) terms.push_back({map.s[b][t - 1], -1.0});
            m.add_row(idx("soc", {b, t}), std::move(terms), Sense::eq, t == 0 ? bat.initial : 0.0);
            m.add_row(idx("exclusive", {b, t}), {{map.x[b][t], 1.0}, {map.y[b][t], 1.0}}, Sense::le, 1.0);
        }
    }

    // Per-slot activity terms: v at the first-week position for whole weeks,
    // start variables for occurrences of a trailing partial week that fit.
    auto activity_terms = [&](int t, auto weight) {
        std::vector<Term> out;
        for (auto const& a : inst.activities) {
            double wgt = weight(a);
            if (wgt == 0.0) continue;
            auto const& v = map.v[a.id];
            if (!a.recurring()) {
                if (v[t] >= 0) out.push_back({v[t], wgt});
                continue;
            }
            if (t < off) continue;
            int week_start = off + ((t - off) / W) * W;
            int pos = t - week_start;
            if (week_start + W <= T) {
                if (v[pos] >= 0) out.push_back({v[pos], wgt});
                continue;
            }
            auto const& z = map.z[a.id];
            for (int s = std::max(0, pos - a.duration + 1); s <= pos; ++s)
                if (z[s] >= 0 && week_start + s + a.duration <= T) out.push_back({z[s], wgt});
        }
        return out;
    };
    int total_small = inst.total_small_rooms();
    int total_large = inst.total_large_rooms();
    for (int t = 0; t < T; ++t) {
        auto large = activity_terms(t, [](Activity const& a) { return double(a.large_rooms); });
        if (!large.empty()) m.add_row(idx("rooms_large", {t}), std::move(large), Sense::le, total_large);
        auto small = activity_terms(t, [](Activity const& a) { return double(a.small_rooms); });
        if (!small.empty()) m.add_row(idx("rooms_small", {t}), std::move(small), Sense::le, total_small);
    }

    // Net load and peak linearisation, per scenario.
    for (int k = 0; k < K; ++k) {
        std::string tag = saa ? "_" + std::to_string(k) : "";
        for (int t = 0; t < T; ++t) {
            std::vector<Term> terms{{map.ell[k][t], 1.0}};
            for (int b = 0; b < NB; ++b) {
                terms.push_back({map.x[b][t], -inst.batteries[b].charge_draw()});
                terms.push_back({map.y[b][t], inst.batteries[b].discharge_supply()});
            }
            for (auto tm : activity_terms(t, [](Activity const& a) { return a.load(); }))
                terms.push_back({tm.var, -tm.coef});
            m.add_row("net_load" + tag + "_" + std::to_string(t), std::move(terms), Sense::eq, scenarios[k][t]);
        }
        std::vector<Term> one, cover;
        for (int i = 1; i <= M; ++i) {
            one.push_back({map.lambda[k][i - 1], 1.0});
            cover.push_back({map.lambda[k][i - 1], double(i)});
        }
        cover.push_back({map.eta[k], -1.0});
        m.add_row("peak_one" + tag, std::move(one), Sense::le, 1.0);
        m.add_row("peak_cover" + tag, std::move(cover), Sense::ge, 0.0);
        for (int t = 0; t < T; ++t) {
            m.add_row("peak_above" + tag + "_" + std::to_string(t), {{map.eta[k], 1.0}, {map.ell[k][t], -1.0}},
                      Sense::ge, 0.0);
            m.add_row("peak_below" + tag + "_" + std::to_string(t), {{map.eta[k], 1.0}, {map.ell[k][t], 1.0}},
                      Sense::ge, 0.0);
        }
    }
    return m;
}

}  // namespace detail

/// Scheduling MILP with rooms at aggregate totals and the demand charge
/// linearised through one-hot peak levels 1..M.
inline MipModel build_deterministic_model(Instance const& inst) {
    return detail::build_model(inst, {inst.net_base_load}, false);
}

/// Shared schedule and battery variables, per-scenario net load and peak.
/// The objective averages the grid terms over scenarios.
inline MipModel build_saa_model(Instance const& inst, std::vector<std::vector<double>> const& scenarios) {
    if (scenarios.empty()) throw std::invalid_argument("scenario set is empty");
    for (auto const& sc : scenarios)
        if (int(sc.size()) != inst.grid.total_slots())
            throw std::invalid_argument("scenario length differs from grid");
    return detail::build_model(inst, scenarios, true);
}

/// Binary start variables an unpruned encoding would need: every first-week
/// slot per recurring activity, every grid slot per once-off.
inline long naive_start_variable_count(Instance const& inst) {
    long n = 0;
    for (auto const& a : inst.activities) n += a.recurring() ? inst.grid.week_slots() : inst.grid.total_slots();
    return n;
}

inline long start_variable_count(MipModel const& m) {
    long n = 0;
    for (auto const& s : m.map.starts) n += long(s.size());
    return n;
}

}  // namespace predopt::mip
