// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include "predopt/predopt.hpp"
#include "support/fixtures.hpp"
#include "support/golden.hpp"
#include "support/micro.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace predopt;
namespace hx = predopt::heuristics;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, std::string const& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream out;
    out.precision(digits);
    out << std::fixed << v;
    return out.str();
}

std::int64_t scaled(double v) { return std::llround(v * 4000.0); }

GeneratedInstance small_instance(std::uint64_t seed) {
    GeneratorParams p;
    p.seed = seed;
    auto grid = build_time_grid(make_date(2020, 11, 2), 7);
    return generate_instance(p, synthetic_base_series(grid, seed), grid);
}

Outcome oracle_equivalence() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    int compared = 0;
    for (std::uint64_t seed = 1; compared < 25 && seed < 200; ++seed) {
        auto f = micro::make_fixture(seed);
        auto want = micro::oracle(f);
        if (want.feasible_activity_sets == 0) continue;
        auto got = hx::solve_exact(f.inst);
        o.require(scaled(got.objective) == want.best, "seed " + std::to_string(seed) + " differs from enumeration");
        ++compared;
    }
    double secs = seconds_since(t0);
    o.require(compared == 25, "too few feasible micro fixtures");
    o.require(secs < 60.0, "took " + fmt(secs) + " s");
    if (o.ok) o.detail = std::to_string(compared) + " instances, max diff 0, " + fmt(secs) + " s";
    return o;
}

Outcome milp_consistency() {
    Outcome o;
    hx::RandomScheduleOptions opt;
    opt.nonnegative_net_load = true;
    int checked = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; checked < 100 && seed <= 40; ++seed) {
        auto inst = small_instance(seed).instance;
        auto m = mip::build_deterministic_model(inst);
        std::mt19937_64 rng(seed);
        for (int k = 0; k < 10 && checked < 100; ++k) {
            auto s = hx::random_feasible_schedule(inst, rng, opt);
            auto cost = objective_cost(inst, s);
            if (!cost.negative_load_slots.empty()) continue;
            auto r = mip::check_assignment(m, mip::encode_schedule(m, inst, s));
            o.require(r.feasible, "encoded schedule violates " + (r.violated.empty() ? std::string() : r.violated.front()));
            double eta = cost.peak_load;
            double gap = 0.005 * (std::ceil(eta) * std::ceil(eta) - eta * eta);
            worst = std::max(worst, std::abs(r.objective - cost.total - gap));
            ++checked;
        }
    }
    o.require(checked == 100, "only " + std::to_string(checked) + " schedules with nonnegative net load");
    o.require(worst <= 1e-6, "objective gap off by " + std::to_string(worst));
    if (o.ok) o.detail = "100 schedules feasible, max gap error " + std::to_string(worst);
    return o;
}

Outcome objective_arithmetic() {
    Outcome o;
    auto inst = fixtures::four_slot_instance({40, 40, 40, 40}, {100, 100, 100, 100});
    auto c = objective_cost(inst, Schedule::empty(inst));
    o.require(std::abs(c.energy_cost - 4.0) <= 1e-9, "energy " + fmt(c.energy_cost, 6));
    o.require(std::abs(c.demand_charge - 50.0) <= 1e-9, "demand " + fmt(c.demand_charge, 6));
    o.require(std::abs(c.total - 54.0) <= 1e-9, "total " + fmt(c.total, 6));
    if (o.ok) o.detail = "energy 4.00, demand 50.00, total 54.00";
    return o;
}

Outcome algorithm_fidelity() {
    Outcome o;
    int improved = 0;
    double slowest = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto inst = small_instance(seed).instance;
        auto init = hx::construct_initial(inst);
        hx::FixOptParams p;
        p.seed = seed;
        auto t0 = std::chrono::steady_clock::now();
        auto r = hx::fix_and_optimize(inst, init, p);
        slowest = std::max(slowest, seconds_since(t0));
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            o.require(r.trace[i] <= r.trace[i - 1], "trace increases on seed " + std::to_string(seed));
        o.require(check_feasibility(inst, r.schedule).empty(), "infeasible result on seed " + std::to_string(seed));
        improved += r.objective < objective_cost(inst, init).total;
    }
    o.require(improved >= 8, "improved on only " + std::to_string(improved) + "/10");
    o.require(slowest < 300.0, "slowest instance took " + fmt(slowest) + " s");
    if (o.ok) o.detail = "improved " + std::to_string(improved) + "/10, slowest " + fmt(slowest) + " s";
    return o;
}

Outcome saa_behaviour() {
    Outcome o;
    int compared = 0;
    for (std::uint64_t seed = 1; seed <= 40 && compared < 20; ++seed) {
        auto f = micro::make_fixture(seed);
        if (micro::oracle(f).feasible_activity_sets == 0) continue;
        std::vector<double> low(f.inst.net_base_load), high(f.inst.net_base_load);
        for (std::size_t t = 0; t < low.size(); ++t) {
            low[t] -= 20.0 + 5.0 * double(t);
            high[t] += 20.0 + 5.0 * double(t);
        }
        auto avg = hx::Objective::saa({low, high}, hx::ObjectiveMode::average);
        auto central = hx::solve_exact(f.inst).schedule;
        auto robust = hx::solve_exact(f.inst, avg);
        o.require(robust.objective <= avg(f.inst, central) + 1e-9, "SAA optimum loses on seed " + std::to_string(seed));
        auto same = hx::Objective::saa({f.inst.net_base_load, f.inst.net_base_load}, hx::ObjectiveMode::average);
        double d = std::abs(hx::solve_exact(f.inst, same).objective - hx::solve_exact(f.inst).objective);
        o.require(d <= 1e-9, "identical scenarios differ on seed " + std::to_string(seed));
        ++compared;
    }
    o.require(compared >= 15, "too few micro fixtures");
    if (o.ok) o.detail = std::to_string(compared) + " micro instances";
    return o;
}

Outcome battery_exactness() {
    Outcome o;
    int compared = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto f = micro::make_fixture(seed);
        auto any = micro::oracle(f, {}, micro::Aggregate::single, false);
        if (any.feasible_activity_sets == 0) continue;
        Schedule s = any.argmin;
        hx::ExactOptions opt;
        opt.fixed_activities.resize(f.inst.activities.size());
        for (auto const& a : f.inst.activities) opt.fixed_activities[a.id] = s.activities[a.id];
        auto total = hx::optimize_battery_total(f.inst, s);
        o.require(micro::scaled_cost(f, total) == scaled(hx::solve_exact(f.inst, {}, opt).objective),
                  "total dispatch differs on seed " + std::to_string(seed));
        Schedule dp = s;
        dp.batteries = hx::optimize_battery(f.inst, s);
        auto energy = micro::oracle(f, {}, micro::Aggregate::single, true, s, false);
        o.require(micro::scaled_cost(f, dp, false) == energy.best, "energy dispatch differs on seed " + std::to_string(seed));
        ++compared;
    }
    int holds = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        micro::MicroParams mp;
        mp.fixed_efficiency = 1 + int(seed % 2);
        auto f = micro::make_fixture(seed, mp);
        f.inst.batteries[0].initial = 0.0;
        std::fill(f.inst.price.begin(), f.inst.price.end(), double(seed % 50));
        auto plan = hx::optimize_battery(f.inst, Schedule::empty(f.inst));
        bool all_hold = std::all_of(plan[0].begin(), plan[0].end(), [](BatteryAction a) { return a == BatteryAction::hold; });
        holds += all_hold;
    }
    o.require(holds == 100, "all-hold failed on " + std::to_string(100 - holds) + " fixtures");
    if (o.ok) o.detail = std::to_string(compared) + " dispatch comparisons, 100/100 all-hold";
    return o;
}

Outcome generator_structure() {
    Outcome o;
    auto grid = build_time_grid(make_date(2020, 11, 2), 7);
    for (auto size : {InstanceSize::small, InstanceSize::large}) {
        GeneratorParams p;
        p.size = size;
        p.seed = 7;
        auto series = synthetic_base_series(grid, 7);
        double max_base = 0.0;
        for (auto const& s : series.building_load)
            for (double v : s.values) max_base = std::max(max_base, v);
        auto g = generate_instance(p, series, grid);
        auto const& inst = g.instance;
        std::size_t want_r = size == InstanceSize::small ? 50 : 200, want_o = size == InstanceSize::small ? 20 : 100;
        o.require(inst.ids_of(ActivityKind::recurring).size() == want_r, "wrong recurring count");
        o.require(inst.ids_of(ActivityKind::once_off).size() == want_o, "wrong once-off count");
        for (auto const& a : inst.activities) {
            bool in_range = a.duration >= 2 && a.duration <= 10 && a.rooms() >= 1 && a.rooms() <= 3 &&
                            a.power >= max_base / 20 - 1e-9 && a.power <= max_base / 10 + 1e-9;
            if (!a.recurring())
                in_range = in_range && a.value > 0 && a.penalty >= 0.2 * a.value - 1e-9 && a.penalty <= 0.5 * a.value + 1e-9;
            o.require(in_range, "activity " + std::to_string(a.id) + " has a field out of range");
            auto day = precedence_day(inst.grid, *g.tentative.activities[a.id]);
            if (inst.grid.weekday_of_day(day) == 0) o.require(a.prerequisites.empty(), "Monday activity has prerequisites");
        }
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = small_instance(seed);
        auto s = recurring_only(g.instance, g.tentative);
        o.require(check_feasibility(g.instance, s).empty(), "tentative infeasible on seed " + std::to_string(seed));
    }
    if (o.ok) o.detail = "sizes 50/20 and 200/100, ranges hold, 50 tentative schedules feasible";
    return o;
}

double scripted_mase(std::vector<double> const& y, std::vector<double> const& a, std::vector<double> const& f, int S) {
    double num = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) num += std::fabs(f[k] - a[k]);
    num /= double(a.size());
    double den = 0.0;
    for (std::size_t k = S; k < y.size(); ++k) den += std::fabs(y[k] - y[k - S]);
    den /= double(y.size() - S);
    return num / den;
}

Outcome mase_harness() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        int M = 96 * (2 + k % 4), h = 96;
        std::vector<double> y(M), a(h), f(h);
        for (auto& v : y) v = 100 + noise(rng);
        for (auto& v : a) v = 100 + noise(rng);
        for (auto& v : f) v = 100 + noise(rng);
        double got = mase({y, a, f, 96});
        worst = std::max(worst, std::abs(got - scripted_mase(y, a, f, 96)));
        o.require(mase({y, a, a, 96}) == 0.0, "perfect forecast scores nonzero");
    }
    o.require(worst <= 1e-9, "disagreement " + std::to_string(worst));
    std::vector<double> flat(96 * 3);
    for (std::size_t t = 0; t < flat.size(); ++t) flat[t] = double(t % 96);
    std::vector<double> one(96, 1.0);
    bool threw = false;
    try {
        mase({flat, one, one, 96});
    } catch (DomainError const&) {
        threw = true;
    }
    o.require(threw, "seasonal-constant training did not raise");
    if (o.ok) o.detail = "max disagreement " + std::to_string(worst) + ", zero-scale error raised";
    return o;
}

Outcome seasonal_forecaster() {
    Outcome o;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 4.0);
    int weeks = 8, W = 672;
    std::vector<double> y(W * (weeks + 1));
    for (std::size_t t = 0; t < y.size(); ++t) {
        int slot = int(t % W);
        double daily = 40.0 * std::sin(2 * std::numbers::pi * (slot % 96) / 96.0);
        double weekend = slot >= 5 * 96 ? -30.0 : 0.0;
        y[t] = 100.0 + daily + weekend + noise(rng);
    }
    std::vector<double> hist(y.begin(), y.begin() + W * weeks), actual(y.begin() + W * weeks, y.end());
    double sm = mase({hist, actual, seasonal_median_forecast(hist, W, weeks), 96});
    double nv = mase({hist, actual, naive_last_value_forecast(hist, W), 96});
    o.require(sm < 1.0, "seasonal median MASE " + fmt(sm));
    o.require(nv > sm, "naive MASE " + fmt(nv) + " not above seasonal " + fmt(sm));
    if (o.ok) o.detail = "seasonal median MASE " + fmt(sm) + ", naive " + fmt(nv);
    return o;
}

Outcome format_round_trips() {
    Outcome o;
    SeriesSet set{"campus", 96, {}};
    set.series.push_back({"Building0", make_timestamp(make_date(2020, 10, 1), 15), {1.5, kMissing, -2.0, 1e-7}});
    set.series.push_back({"price", make_timestamp(make_date(2020, 10, 1)), {40.25, 41}});
    o.require(parse_tsf(write_tsf(set)) == set, "TSF round trip");

    auto g = small_instance(3);
    auto inst = parse_instance(dump_instance(g.instance));
    o.require(inst == g.instance, "instance round trip");
    auto s = feasible_tentative(g.instance, g.tentative);
    o.require(parse_schedule(inst, dump_schedule(inst, s)) == s, "schedule round trip");

    auto model = mip::build_deterministic_model(golden::micro_instance());
    auto mps = mip::export_model(model, mip::ExportFormat::mps);
    o.require(mip::export_model(mip::parse_mps(mps), mip::ExportFormat::mps) == mps, "MPS round trip");

    auto tiny = golden::one_binary_model();
    auto same = [](std::string const& name, std::string const& text) {
        try {
            return read_file(golden::path(name)) == text;
        } catch (std::exception const&) {
            return false;
        }
    };
    o.require(same("tiny.mps", mip::export_model(tiny, mip::ExportFormat::mps)), "tiny.mps differs from golden");
    o.require(same("tiny.lp", mip::export_model(tiny, mip::ExportFormat::lp)), "tiny.lp differs from golden");
    o.require(same("micro.mps", mps), "micro.mps differs from golden");
    o.require(same("micro.lp", mip::export_model(model, mip::ExportFormat::lp)), "micro.lp differs from golden");
    if (o.ok) o.detail = "TSF, instance, schedule and MPS round trips; 4 golden files stable";
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<char const*, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"MILP consistency", milp_consistency},
        {"objective arithmetic", objective_arithmetic},
        {"fix-and-optimize fidelity", algorithm_fidelity},
        {"SAA behaviour", saa_behaviour},
        {"battery dispatch exactness", battery_exactness},
        {"generator structure", generator_structure},
        {"MASE harness", mase_harness},
        {"seasonal-median forecaster", seasonal_forecaster},
        {"format round trips", format_round_trips},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (std::exception const& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.ok;
        std::printf("%s %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
