// predopt: generate, forecast, solve, check and price building-energy
// scheduling instances from the command line.

#include "predopt/predopt.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace predopt;
namespace hx = predopt::heuristics;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Ordered key/value report. Structured mode prints `key=value`; human mode
/// aligns the keys and may add timing lines that structured mode omits.
class Report {
public:
    explicit Report(bool structured) : structured_(structured) {}

    void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double value, int digits = 6) { add(std::move(key), fmt(value, digits)); }
    void add(std::string key, long value) { add(std::move(key), std::to_string(value)); }
    void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }
    void timing(std::string key, double seconds) {
        if (!structured_) add(std::move(key), fmt(seconds, 3));
    }
    void summary(std::string key, std::string value) { summary_.emplace_back(std::move(key), std::move(value)); }

    void print(std::ostream& out) const {
        std::size_t w = 0;
        for (auto const& [k, v] : rows_) w = std::max(w, k.size());
        for (auto const& [k, v] : rows_) {
            if (structured_) out << k << '=' << v << '\n';
            else out << k << std::string(w - k.size() + 2, ' ') << v << '\n';
        }
        out << "[summary]\n";
        for (auto const& [k, v] : summary_) out << k << (structured_ ? "=" : ": ") << v << '\n';
    }

private:
    bool structured_;
    std::vector<std::pair<std::string, std::string>> rows_, summary_;
};

// Malformed input files are domain errors, not usage errors.
Instance read_instance(std::string const& path) {
    try {
        return load_instance(path);
    } catch (std::invalid_argument const& e) {
        throw DomainError(path + ": " + e.what());
    }
}

Schedule read_schedule(Instance const& inst, std::string const& path) {
    try {
        return load_schedule(inst, path);
    } catch (std::invalid_argument const& e) {
        throw DomainError(path + ": " + e.what());
    }
}

struct Common {
    std::string report = "structured";
    bool structured() const { return report == "structured"; }
};

void add_report_flag(CLI::App* cmd, Common& c) {
    cmd->add_option("--report", c.report, "Report format")->check(CLI::IsMember({"human", "structured"}));
}

// ---------------------------------------------------------------- gen

struct GenArgs : Common {
    std::string size = "small";
    std::uint64_t seed = 0;
    std::string start = "2020-11-02";
    int days = 30;
    int history_weeks = 8;
    std::string output, tentative, history, actual;
};

/// Series for the history weeks plus the instance month, so the history
/// file and the instance come from one synthetic draw.
struct GeneratedRun {
    GeneratedInstance gen;
    BaseSeries base;
    TimeGrid full;
    int offset = 0;  // first instance slot within the full series
};

GeneratedRun generate_run(std::string const& size, std::uint64_t seed, Date start, int days, int history_weeks) {
    if (history_weeks < 0) throw UsageError("--history-weeks must be nonnegative");
    GeneratorParams p;
    p.size = size == "large" ? InstanceSize::large : InstanceSize::small;
    p.seed = seed;
    Date first{std::chrono::sys_days{start} - std::chrono::days{7 * history_weeks}};
    TimeGrid full(first, days + 7 * history_weeks);
    TimeGrid grid(start, days);
    auto base = synthetic_base_series(full, seed);
    int offset = 7 * history_weeks * grid.steps_per_day();
    int T = grid.total_slots();
    BaseSeries window;
    auto slice = [&](NamedSeries const& s) {
        return NamedSeries{s.name, std::vector<double>(s.values.begin() + offset, s.values.begin() + offset + T)};
    };
    for (auto const& s : base.building_load) window.building_load.push_back(slice(s));
    for (auto const& s : base.solar) window.solar.push_back(slice(s));
    window.price.assign(base.price.begin() + offset, base.price.begin() + offset + T);
    return {generate_instance(p, window, grid), std::move(base), full, offset};
}

/// Net base load of the generated buildings over the full series.
std::vector<double> full_net_load(GeneratedRun const& run) {
    std::vector<double> net(run.full.total_slots(), 0.0);
    auto find = [](std::vector<NamedSeries> const& list, std::string const& name) -> NamedSeries const& {
        for (auto const& s : list)
            if (s.name == name) return s;
        throw DomainError("series " + name + " not found");
    };
    for (auto const& b : run.gen.instance.buildings) {
        auto const& load = find(run.base.building_load, b.base_load_series);
        auto const& sol = find(run.base.solar, b.solar_series);
        for (std::size_t t = 0; t < net.size(); ++t) net[t] += load.values[t] - sol.values[t];
    }
    return net;
}

int run_gen(GenArgs const& a) {
    auto run = generate_run(a.size, a.seed, parse_date(a.start), a.days, a.history_weeks);
    auto const& inst = run.gen.instance;
    write_file(a.output, dump_instance(inst));
    if (!a.tentative.empty()) write_file(a.tentative, dump_schedule(inst, feasible_tentative(inst, run.gen.tentative)));
    auto net = full_net_load(run);
    Timestamp hist_start = make_timestamp(run.full.start_date());
    Timestamp inst_start = make_timestamp(inst.grid.start_date());
    if (!a.history.empty()) {
        SeriesSet h{"history", std::nullopt, {}};
        h.series.push_back({"net_load", hist_start, {net.begin(), net.begin() + run.offset}});
        h.series.push_back({"price", hist_start, {run.base.price.begin(), run.base.price.begin() + run.offset}});
        write_file(a.history, write_tsf(h));
    }
    if (!a.actual.empty()) {
        SeriesSet h{"actual", inst.grid.total_slots(), {}};
        h.series.push_back({"net_load", inst_start, {net.begin() + run.offset, net.end()}});
        write_file(a.actual, write_tsf(h));
    }
    Report r(a.structured());
    r.add("command", "gen");
    r.add("seed", std::to_string(a.seed));
    r.add("size", a.size);
    r.add("start", format_date(inst.grid.start_date()));
    r.add("days", inst.grid.num_days());
    r.add("slots", inst.grid.total_slots());
    r.add("recurring", int(inst.ids_of(ActivityKind::recurring).size()));
    r.add("once_off", int(inst.ids_of(ActivityKind::once_off).size()));
    r.add("buildings", int(inst.buildings.size()));
    r.add("batteries", int(inst.batteries.size()));
    r.add("small_rooms", inst.total_small_rooms());
    r.add("large_rooms", inst.total_large_rooms());
    r.summary("output", a.output);
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

// ---------------------------------------------------------------- forecast / scenarios

struct ForecastArgs : Common {
    std::string input, output, method = "seasonal-median";
    int horizon = 0;
    int weeks = 8;
    std::vector<double> quantiles{0.1, 0.9};
    std::vector<std::string> series;
};

Timestamp after(Series const& s) { return s.start + std::chrono::minutes{15 * long(s.values.size())}; }

std::vector<Series const*> selected(SeriesSet const& set, std::vector<std::string> const& names) {
    std::vector<Series const*> out;
    if (names.empty()) {
        for (auto const& s : set.series) out.push_back(&s);
        return out;
    }
    for (auto const& n : names) {
        auto const* s = set.find(n);
        if (!s) throw DomainError("series " + n + " not found in input");
        out.push_back(s);
    }
    return out;
}

int resolve_horizon(int flag, SeriesSet const& set) {
    if (flag > 0) return flag;
    if (set.horizon && *set.horizon > 0) return *set.horizon;
    throw UsageError("no horizon: pass --horizon or add @horizon to the input");
}

int run_forecast(ForecastArgs const& a) {
    auto in = parse_tsf(read_file(a.input));
    int h = resolve_horizon(a.horizon, in);
    SeriesSet out{"forecast", h, {}};
    for (auto const* s : selected(in, a.series)) {
        auto values = a.method == "naive" ? naive_last_value_forecast(s->values, h)
                                          : seasonal_median_forecast(s->values, h, a.weeks);
        out.series.push_back({s->name, after(*s), std::move(values)});
    }
    write_file(a.output, write_tsf(out));
    Report r(a.structured());
    r.add("command", "forecast");
    r.add("method", a.method);
    r.add("horizon", h);
    r.add("weeks", a.weeks);
    r.add("series", int(out.series.size()));
    r.summary("output", a.output);
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

std::string quantile_tag(double q) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_q%g", q * 100.0);
    return buf;
}

int run_scenarios(ForecastArgs const& a) {
    auto in = parse_tsf(read_file(a.input));
    int h = resolve_horizon(a.horizon, in);
    SeriesSet out{"scenarios", h, {}};
    for (auto const* s : selected(in, a.series)) {
        auto sc = quantile_scenarios(s->values, h, a.quantiles, a.weeks);
        for (std::size_t k = 0; k < sc.levels.size(); ++k)
            out.series.push_back({s->name + quantile_tag(sc.levels[k]), after(*s), sc.series[k]});
        out.series.push_back({s->name + "_q50", after(*s), sc.central});
    }
    write_file(a.output, write_tsf(out));
    Report r(a.structured());
    r.add("command", "scenarios");
    r.add("horizon", h);
    r.add("weeks", a.weeks);
    r.add("series", int(out.series.size()));
    r.summary("output", a.output);
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

// ---------------------------------------------------------------- solve

struct ObjectiveArgs {
    std::vector<std::string> scenario_files;
    std::string mode = "det";
};

hx::Objective load_objective(Instance const& inst, ObjectiveArgs const& a) {
    if (a.mode == "det") {
        if (!a.scenario_files.empty()) throw UsageError("--scenarios needs --mode avg or worst");
        return hx::Objective::deterministic();
    }
    if (a.scenario_files.empty()) throw UsageError("--mode " + a.mode + " needs --scenarios");
    std::vector<std::vector<double>> scenarios;
    int T = inst.grid.total_slots();
    for (auto const& f : a.scenario_files)
        for (auto const& s : parse_tsf(read_file(f)).series) {
            if (int(s.values.size()) < T)
                throw DomainError("scenario " + s.name + " in " + f + " has " + std::to_string(s.values.size()) +
                                  " values, the grid needs " + std::to_string(T));
            std::vector<double> v(s.values.begin(), s.values.begin() + T);
            for (double x : v)
                if (is_missing(x)) throw DomainError("scenario " + s.name + " has missing values");
            scenarios.push_back(std::move(v));
        }
    return hx::Objective::saa(std::move(scenarios),
                              a.mode == "avg" ? hx::ObjectiveMode::average : hx::ObjectiveMode::worst_case);
}

struct SolveArgs : Common {
    std::string instance, output, init, trace, solver = "lns";
    ObjectiveArgs objective;
    std::uint64_t seed = 0;
    double budget_secs = 0.0;
    double alpha = 1.10;
    hx::FixOptParams fo;
    long effort = 3'000;
    double leaf_cap = 1e7;
};

void add_cost_rows(Report& r, Instance const& inst, Schedule const& s, hx::Objective const& obj) {
    auto c = objective_cost(inst, s);
    r.add("energy_cost", c.energy_cost);
    r.add("demand_charge", c.demand_charge);
    r.add("onceoff_profit", c.onceoff_profit);
    r.add("total", c.total);
    r.add("peak_load", c.peak_load);
    if (obj.mode != hx::ObjectiveMode::deterministic) r.add("scenario_objective", obj(inst, s));
}

int run_solve(SolveArgs const& a) {
    auto inst = read_instance(a.instance);
    auto obj = load_objective(inst, a.objective);
    hx::SolveReport rep;
    auto start = [&] { return a.init.empty() ? hx::construct_initial(inst) : read_schedule(inst, a.init); };
    if (a.solver == "exact") {
        hx::ExactOptions ex;
        ex.leaf_cap = a.leaf_cap;
        ex.time_limit = a.budget_secs;
        rep = hx::solve_exact(inst, obj, ex);
    } else if (a.solver == "ls") {
        std::mt19937_64 rng(a.seed);
        hx::LocalSearchParams lp;
        lp.max_evaluations = a.effort;
        lp.time_limit = a.budget_secs;
        rep = hx::local_search(inst, start(), lp, rng, obj);
    } else if (a.solver == "lns") {
        auto fo = a.fo;
        fo.seed = a.seed;
        fo.effort = a.effort;
        fo.time_limit = a.budget_secs;
        rep = hx::fix_and_optimize(inst, start(), fo, obj);
    } else {
        hx::TwoStageParams tp;
        tp.alpha = a.alpha;
        tp.seed = a.seed;
        tp.effort = a.effort;
        tp.time_limit = a.budget_secs;
        rep = hx::two_stage_peak_cap(inst, tp, obj);
    }
    hx::require_feasible(inst, rep.schedule, "solver result");
    write_file(a.output, dump_schedule(inst, rep.schedule));
    if (!a.trace.empty()) {
        std::ostringstream t;
        t << "step,objective\n";
        for (std::size_t i = 0; i < rep.trace.size(); ++i) t << i << ',' << fmt(rep.trace[i]) << '\n';
        write_file(a.trace, t.str());
    }
    Report r(a.structured());
    r.add("command", "solve");
    r.add("seed", std::to_string(a.seed));
    r.add("solver", a.solver);
    r.add("mode", a.objective.mode);
    r.add("termination", hx::to_string(rep.termination));
    r.add("iterations", rep.iterations);
    r.add("evaluations", rep.evaluations);
    r.add("initial_objective", rep.initial_objective);
    r.add("objective", rep.objective);
    if (a.solver == "two-stage") {
        r.add("peak_lower_bound", rep.peak_lower_bound);
        r.add("peak_cap", rep.peak_cap);
    }
    add_cost_rows(r, inst, rep.schedule, obj);
    r.timing("wall_seconds", rep.wall_seconds);
    r.summary("output", a.output);
    r.summary("violations", "0");
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

// ---------------------------------------------------------------- check / cost

struct PairArgs : Common {
    std::string instance, schedule;
    ObjectiveArgs objective;
};

int run_check(PairArgs const& a) {
    auto inst = read_instance(a.instance);
    auto s = read_schedule(inst, a.schedule);
    auto v = check_feasibility(inst, s);
    Report r(a.structured());
    r.add("command", "check");
    r.add("violations", int(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) r.add("violation_" + std::to_string(i), describe(v[i]));
    r.summary("status", v.empty() ? "feasible" : "infeasible");
    r.print(std::cout);
    if (!v.empty()) {
        std::cerr << "error: schedule is infeasible: " << describe(v.front()) << '\n';
        return 1;
    }
    return 0;
}

int run_cost(PairArgs const& a) {
    auto inst = read_instance(a.instance);
    auto s = read_schedule(inst, a.schedule);
    auto obj = load_objective(inst, a.objective);
    auto c = objective_cost(inst, s);
    Report r(a.structured());
    r.add("command", "cost");
    r.add("mode", a.objective.mode);
    add_cost_rows(r, inst, s, obj);
    r.add("negative_load_slots", int(c.negative_load_slots.size()));
    r.add("violations", int(check_feasibility(inst, s).size()));
    r.summary("total", fmt(obj(inst, s), 2));
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

// ---------------------------------------------------------------- score-forecast

struct ScoreArgs : Common {
    std::string training, actual, forecast, missing = "reject";
    int season = 96;
};

int run_score(ScoreArgs const& a) {
    auto train = parse_tsf(read_file(a.training));
    auto act = parse_tsf(read_file(a.actual));
    auto fc = parse_tsf(read_file(a.forecast));
    auto policy = a.missing == "skip" ? MissingPolicy::skip : MissingPolicy::reject;
    Report r(a.structured());
    r.add("command", "score-forecast");
    r.add("season", a.season);
    double sum = 0.0;
    int n = 0, skipped = 0;
    for (auto const& f : fc.series) {
        auto const* y = act.find(f.name);
        if (!y) {
            ++skipped;
            continue;
        }
        auto const* m = train.find(f.name);
        if (!m) throw DomainError("series " + f.name + " missing from the training file");
        std::size_t h = std::min(f.values.size(), y->values.size());
        double v = mase({m->values, std::span(y->values).first(h), std::span(f.values).first(h), a.season}, policy);
        r.add("mase_" + f.name, v);
        sum += v;
        ++n;
    }
    if (n == 0) throw DomainError("no forecast series has a matching actual series");
    r.add("series", n);
    r.add("skipped", skipped);
    r.summary("mean_mase", fmt(sum / n));
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

// ---------------------------------------------------------------- export-mip

struct ExportArgs : Common {
    std::string instance, output, format = "mps", solution, write_schedule;
    std::vector<std::string> scenario_files;
};

int run_export(ExportArgs const& a) {
    auto inst = read_instance(a.instance);
    auto fmt_tag = mip::parse_export_format(a.format);
    mip::MipModel m;
    if (a.scenario_files.empty()) {
        m = mip::build_deterministic_model(inst);
    } else {
        auto obj = load_objective(inst, {a.scenario_files, "avg"});
        m = mip::build_saa_model(inst, obj.scenarios);
    }
    write_file(a.output, mip::export_model(m, fmt_tag));
    Report r(a.structured());
    r.add("command", "export-mip");
    r.add("format", a.format);
    r.add("variables", int(m.vars.size()));
    r.add("rows", int(m.rows.size()));
    r.add("binaries", int(m.count(mip::VarKind::binary)));
    r.add("integers", int(m.count(mip::VarKind::integer)));
    r.add("start_variables", mip::start_variable_count(m));
    r.add("naive_start_variables", mip::naive_start_variable_count(inst));
    if (!a.solution.empty()) {
        auto x = mip::import_solution(m, read_file(a.solution));
        auto check = mip::check_assignment(m, x);
        r.add("solution_feasible", check.feasible ? "true" : "false");
        r.add("solution_objective", check.objective);
        if (!check.feasible) throw InfeasibleError("solution violates " + check.violated.front());
        if (!a.write_schedule.empty()) {
            auto s = mip::assign_rooms(inst, mip::decode_assignment(m, inst, x));
            write_file(a.write_schedule, dump_schedule(inst, s));
        }
    }
    r.summary("output", a.output);
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

// ---------------------------------------------------------------- demo

struct DemoArgs : Common {
    std::string size = "small";
    std::uint64_t seed = 7;
    int days = 7;
    int max_iter = 30;
};

int run_demo(DemoArgs const& a) {
    auto run = generate_run(a.size, a.seed, parse_date("2020-11-02"), a.days, 8);
    auto const& inst = run.gen.instance;
    auto net = full_net_load(run);
    int T = inst.grid.total_slots();
    std::vector<double> history(net.begin(), net.begin() + run.offset);
    std::vector<double> truth(net.begin() + run.offset, net.end());
    auto forecast = seasonal_median_forecast(history, T);
    double score = mase({history, truth, forecast, 96});

    // Plan against the forecast, then price the plan against what happened.
    Instance planned = inst;
    planned.net_base_load = forecast;
    auto init = hx::construct_initial(planned);
    hx::FixOptParams fo;
    fo.max_iter = a.max_iter;
    fo.seed = a.seed;
    auto rep = hx::fix_and_optimize(planned, init, fo);

    Report r(a.structured());
    r.add("command", "demo");
    r.add("seed", std::to_string(a.seed));
    r.add("size", a.size);
    r.add("slots", T);
    r.add("forecast_mase", score);
    auto row = [&](std::string const& name, Schedule const& s) {
        auto p = objective_cost(planned, s);
        auto c = objective_cost(inst, s);
        r.add(name + ".energy_cost", c.energy_cost, 2);
        r.add(name + ".demand_charge", c.demand_charge, 2);
        r.add(name + ".onceoff_profit", c.onceoff_profit, 2);
        r.add(name + ".total", c.total, 2);
        r.add(name + ".planned_total", p.total, 2);
    };
    row("initial", init);
    row("final", rep.schedule);
    r.add("termination", hx::to_string(rep.termination));
    for (std::size_t i = 0; i < rep.trace.size(); ++i) r.add("trace." + std::to_string(i), rep.trace[i], 2);
    r.timing("wall_seconds", rep.wall_seconds);
    r.summary("status", "ok");
    r.print(std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predict-and-optimise toolkit for building energy scheduling"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate an instance");
    g->add_option("--size", gen.size)->check(CLI::IsMember({"small", "large"}));
    g->add_option("--seed", gen.seed);
    g->add_option("--start", gen.start, "First day, YYYY-MM-DD");
    g->add_option("--days", gen.days);
    g->add_option("--history-weeks", gen.history_weeks);
    g->add_option("-o,--output", gen.output)->required();
    g->add_option("--tentative", gen.tentative, "Write the tentative schedule here");
    g->add_option("--history", gen.history, "Write the preceding net load and prices as TSF");
    g->add_option("--actual", gen.actual, "Write the instance's realised net load as TSF");
    add_report_flag(g, gen);

    ForecastArgs fc;
    auto* f = app.add_subcommand("forecast", "Point forecast of every series in a TSF file");
    f->add_option("-i,--input", fc.input)->required();
    f->add_option("-o,--output", fc.output)->required();
    f->add_option("--horizon", fc.horizon);
    f->add_option("--weeks", fc.weeks);
    f->add_option("--method", fc.method)->check(CLI::IsMember({"seasonal-median", "naive"}));
    f->add_option("--series", fc.series);
    add_report_flag(f, fc);

    ForecastArgs sc;
    auto* s = app.add_subcommand("scenarios", "Quantile scenarios of every series in a TSF file");
    s->add_option("-i,--input", sc.input)->required();
    s->add_option("-o,--output", sc.output)->required();
    s->add_option("--horizon", sc.horizon);
    s->add_option("--weeks", sc.weeks);
    s->add_option("--quantiles", sc.quantiles)->delimiter(',');
    s->add_option("--series", sc.series);
    add_report_flag(s, sc);

    SolveArgs sv;
    auto* so = app.add_subcommand("solve", "Optimise a schedule");
    so->add_option("instance", sv.instance)->required();
    so->add_option("-o,--output", sv.output)->required();
    so->add_option("--solver", sv.solver)->check(CLI::IsMember({"exact", "ls", "lns", "two-stage"}));
    so->add_option("--init", sv.init, "Starting schedule (default: constructive)");
    so->add_option("--scenarios", sv.objective.scenario_files);
    so->add_option("--mode", sv.objective.mode)->check(CLI::IsMember({"det", "avg", "worst"}));
    so->add_option("--alpha", sv.alpha);
    so->add_option("--seed", sv.seed);
    so->add_option("--budget-secs", sv.budget_secs, "Wall-clock limit, 0 = none");
    so->add_option("--r", sv.fo.r_count, "Recurring activities freed per iteration");
    so->add_option("--a", sv.fo.a_count, "Once-off activities freed per iteration");
    so->add_option("--max-iter", sv.fo.max_iter);
    so->add_option("--patience", sv.fo.patience);
    so->add_option("--tol", sv.fo.tol);
    so->add_option("--effort", sv.effort, "Candidate moves per local search");
    so->add_option("--exhaustive-cap", sv.fo.exhaustive_cap);
    so->add_option("--leaf-cap", sv.leaf_cap);
    so->add_option("--trace", sv.trace, "Write the objective trace as CSV");
    add_report_flag(so, sv);

    PairArgs ck;
    auto* c = app.add_subcommand("check", "Report every violated constraint");
    c->add_option("instance", ck.instance)->required();
    c->add_option("schedule", ck.schedule)->required();
    add_report_flag(c, ck);

    PairArgs co;
    auto* cs = app.add_subcommand("cost", "Price a schedule");
    cs->add_option("instance", co.instance)->required();
    cs->add_option("schedule", co.schedule)->required();
    cs->add_option("--scenarios", co.objective.scenario_files);
    cs->add_option("--mode", co.objective.mode)->check(CLI::IsMember({"det", "avg", "worst"}));
    add_report_flag(cs, co);

    ScoreArgs sa;
    auto* sf = app.add_subcommand("score-forecast", "MASE of forecasts against actuals");
    sf->add_option("--training", sa.training)->required();
    sf->add_option("--actual", sa.actual)->required();
    sf->add_option("--forecast", sa.forecast)->required();
    sf->add_option("--season", sa.season);
    sf->add_option("--missing", sa.missing)->check(CLI::IsMember({"reject", "skip"}));
    add_report_flag(sf, sa);

    ExportArgs ex;
    auto* e = app.add_subcommand("export-mip", "Write the MILP model");
    e->add_option("instance", ex.instance)->required();
    e->add_option("-o,--output", ex.output)->required();
    e->add_option("--format", ex.format);
    e->add_option("--scenarios", ex.scenario_files);
    e->add_option("--solution", ex.solution, "Check a `name value` solution file against the model");
    e->add_option("--write-schedule", ex.write_schedule, "Decode the checked solution into a schedule");
    add_report_flag(e, ex);

    DemoArgs dm;
    auto* d = app.add_subcommand("demo", "Generate, forecast, solve and price a small instance");
    d->add_option("--size", dm.size)->check(CLI::IsMember({"small", "large"}));
    d->add_option("--seed", dm.seed);
    d->add_option("--days", dm.days);
    d->add_option("--max-iter", dm.max_iter);
    add_report_flag(d, dm);

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*g) return run_gen(gen);
        if (*f) return run_forecast(fc);
        if (*s) return run_scenarios(sc);
        if (*so) return run_solve(sv);
        if (*c) return run_check(ck);
        if (*cs) return run_cost(co);
        if (*sf) return run_score(sa);
        if (*e) return run_export(ex);
        if (*d) return run_demo(dm);
    } catch (UsageError const& err) {
        std::cerr << "usage error: " << err.what() << '\n';
        return 2;
    } catch (std::invalid_argument const& err) {
        std::cerr << "usage error: " << err.what() << '\n';
        return 2;
    } catch (std::exception const& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 2;
}
