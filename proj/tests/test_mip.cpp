#include "predopt/generator.hpp"
#include "predopt/heuristics/construct.hpp"
#include "predopt/heuristics/exact.hpp"
#include "predopt/mip/check.hpp"
#include "predopt/mip/export.hpp"
#include "predopt/mip/rooms.hpp"
#include "support/fixtures.hpp"
#include "support/golden.hpp"
#include "support/micro.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace predopt;
using namespace predopt::mip;

namespace {

bool violates(CheckResult const& r, std::string const& prefix) {
    return std::any_of(r.violated.begin(), r.violated.end(),
                       [&](std::string const& v) { return v.rfind(prefix, 0) == 0; });
}

double value_of(MipModel const& m, Assignment const& a, std::string const& name) {
    int j = m.find(name);
    EXPECT_GE(j, 0) << name;
    return j < 0 ? std::nan("") : a.values[j];
}

}  // namespace

TEST(MipBuild, StartVariablesCoverTheOfficeWindowOnly) {
    auto inst = fixtures::flat_instance();
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0)};
    auto m = build_deterministic_model(inst);
    EXPECT_EQ(start_variable_count(m), 5 * 31);
    EXPECT_GE(m.find("z_0_66"), 0);
    EXPECT_LT(m.find("z_0_67"), 0);
    EXPECT_LT(m.find("z_0_35"), 0);
    EXPECT_LT(m.find("z_0_" + std::to_string(5 * 96 + 40)), 0);
    EXPECT_LT(start_variable_count(m), naive_start_variable_count(inst));
}

TEST(MipBuild, UnprofitableAfterHoursStartsArePruned) {
    auto inst = fixtures::flat_instance();
    inst.activities = {fixtures::once_off(0, 2, 1, 0, 1.0, 10.0, 10.0)};
    auto m = build_deterministic_model(inst);
    EXPECT_EQ(start_variable_count(m), 5 * 31);
    inst.activities[0].penalty = 9.0;
    EXPECT_EQ(start_variable_count(build_deterministic_model(inst)), 672 - 1);
}

TEST(MipBuild, EmptyInstanceObjectiveIsBaseEnergyPlusPeakLevel) {
    auto inst = fixtures::flat_instance(7, 40.0, 100.0, 0, 0);
    auto m = build_deterministic_model(inst);
    EXPECT_EQ(m.peak_bound, 100);
    auto x = encode_schedule(m, inst, Schedule::empty(inst));
    auto r = check_assignment(m, x);
    EXPECT_TRUE(r.feasible);
    EXPECT_NEAR(r.objective, objective_cost(inst, Schedule::empty(inst)).total, 1e-9);
    EXPECT_NEAR(r.objective, 672 * 0.25 * 100 / 1000 * 40 + 0.005 * 100 * 100, 1e-9);
}

TEST(MipBuild, RejectsGridsWithoutOfficeSlots) {
    Instance inst{TimeGrid(make_date(2024, 1, 6), 2, 4, 1, 4), {Building{0, 1, 0, "", ""}}, {}, {}, {}, {}};
    inst.price.assign(8, 1.0);
    inst.net_base_load.assign(8, 1.0);
    EXPECT_THROW(build_deterministic_model(inst), DomainError);
}

TEST(MipEncode, EmptyScheduleOnZeroLoadIsAllZero) {
    auto inst = fixtures::flat_instance(7, 40.0, 0.0);
    inst.activities = {fixtures::once_off(0, 2, 1, 0, 1.0, 10.0, 1.0)};
    inst.batteries = {Battery{300, 0, 150, 0.81}};
    auto m = build_deterministic_model(inst);
    auto x = encode_schedule(m, inst, Schedule::empty(inst));
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
        auto const& n = m.vars[j].name;
        if (n[0] == 'z' || n[0] == 'v' || n[0] == 'w' || n[0] == 'x' || n[0] == 'y' || n.rfind("lambda", 0) == 0 ||
            n == "eta")
            EXPECT_EQ(x.values[j], 0.0) << n;
    }
    EXPECT_EQ(value_of(m, x, "d_0"), double(m.day_sentinel));
    EXPECT_TRUE(check_assignment(m, x).feasible);
}

TEST(MipEncode, RecurringAndBatteryVariables) {
    auto inst = fixtures::flat_instance(7, 40.0, 10.0);
    inst.activities = {fixtures::recurring(0, 3, 1, 0, 2.0)};
    inst.batteries = {Battery{300, 0, 150, 0.81}};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{36, 0};
    s.batteries[0][5] = BatteryAction::charge;
    auto m = build_deterministic_model(inst);
    auto x = encode_schedule(m, inst, s);
    EXPECT_EQ(value_of(m, x, "z_0_36"), 1.0);
    EXPECT_EQ(value_of(m, x, "v_0_36"), 1.0);
    EXPECT_EQ(value_of(m, x, "v_0_38"), 1.0);
    EXPECT_EQ(value_of(m, x, "v_0_39"), 0.0);
    EXPECT_EQ(value_of(m, x, "w_0"), 1.0);
    EXPECT_EQ(value_of(m, x, "d_0"), 0.0);
    EXPECT_EQ(value_of(m, x, "x_0_5"), 1.0);
    EXPECT_EQ(value_of(m, x, "y_0_5"), 0.0);
    EXPECT_EQ(value_of(m, x, "s_0_4"), 0.0);
    EXPECT_EQ(value_of(m, x, "s_0_5"), 37.5);
    EXPECT_TRUE(check_assignment(m, x).feasible);
}

TEST(MipEncode, PrunedStartIsRejected) {
    auto inst = fixtures::flat_instance();
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0)};
    auto m = build_deterministic_model(inst);
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{10, 0};
    EXPECT_THROW(encode_schedule(m, inst, s), std::invalid_argument);
}

TEST(MipCheck, SimultaneousChargeAndDischargeBreaksExclusivity) {
    auto inst = fixtures::flat_instance(7, 40.0, 10.0);
    inst.batteries = {Battery{300, 150, 150, 1.0}};
    auto m = build_deterministic_model(inst);
    auto x = encode_schedule(m, inst, Schedule::empty(inst));
    x.values[m.map.x[0][3]] = 1.0;
    x.values[m.map.y[0][3]] = 1.0;
    auto r = check_assignment(m, x);
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(violates(r, "exclusive_0_3"));
}

TEST(MipCheck, MissingValuesAndWrongSizes) {
    auto inst = fixtures::flat_instance();
    auto m = build_deterministic_model(inst);
    EXPECT_THROW(check_assignment(m, Assignment::missing(m)), DomainError);
    EXPECT_THROW(check_assignment(m, Assignment{{1.0}}), std::invalid_argument);
}

TEST(MipCheck, FractionalPeakLevelIsNotIntegral) {
    auto inst = fixtures::flat_instance(7, 40.0, 10.0);
    auto m = build_deterministic_model(inst);
    auto x = encode_schedule(m, inst, Schedule::empty(inst));
    x.values[m.map.lambda[0][4]] = 0.5;
    x.values[m.map.lambda[0][9]] = 0.5;
    auto r = check_assignment(m, x);
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(violates(r, "one_hot:"));
}

TEST(MipCheck, InfeasibleScheduleIsCaught) {
    auto inst = fixtures::flat_instance(7, 40.0, 10.0, 1, 0);
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0), fixtures::recurring(1, 2, 1, 0, 1.0, {0})};
    auto m = build_deterministic_model(inst);
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    s.activities[1] = Placement{41, 0};
    auto r = check_assignment(m, encode_schedule(m, inst, s));
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(violates(r, "precedence_0_1"));
    EXPECT_TRUE(violates(r, "rooms_small_41"));
}

TEST(MipConsistency, ObjectiveGapIsTheCeilingOfThePeak) {
    GeneratorParams p;
    p.seed = 4;
    auto grid = build_time_grid(make_date(2020, 11, 2), 7);
    auto inst = generate_instance(p, synthetic_base_series(grid, 4), grid).instance;
    auto m = build_deterministic_model(inst);
    std::mt19937_64 rng(4);
    heuristics::RandomScheduleOptions opt;
    opt.nonnegative_net_load = true;
    int checked = 0;
    for (int k = 0; k < 8; ++k) {
        auto s = heuristics::random_feasible_schedule(inst, rng, opt);
        ASSERT_TRUE(check_feasibility(inst, s).empty());
        auto cost = objective_cost(inst, s);
        if (!cost.negative_load_slots.empty()) continue;
        auto r = check_assignment(m, encode_schedule(m, inst, s));
        EXPECT_TRUE(r.feasible) << (r.violated.empty() ? "" : r.violated.front());
        double eta = cost.peak_load;
        double gap = 0.005 * (std::ceil(eta) * std::ceil(eta) - eta * eta);
        EXPECT_NEAR(r.objective - cost.total, gap, 1e-6);
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(MipConsistency, DecodeInvertsEncode) {
    auto inst = golden::micro_instance();
    auto m = build_deterministic_model(inst);
    auto best = heuristics::solve_exact(inst).schedule;
    auto x = encode_schedule(m, inst, best);
    EXPECT_TRUE(check_assignment(m, x).feasible);
    auto back = assign_rooms(inst, decode_assignment(m, inst, x));
    EXPECT_EQ(back.activities, best.activities);
    EXPECT_EQ(back.batteries, best.batteries);
    EXPECT_TRUE(check_feasibility(inst, back).empty());
}

TEST(MipConsistency, MicroFixturesAgreeWithTheEvaluator) {
    micro::MicroParams mp;
    mp.allow_negative = false;
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto f = micro::make_fixture(seed, mp);
        heuristics::SolveReport r;
        try {
            r = heuristics::solve_exact(f.inst);
        } catch (InfeasibleError const&) {
            continue;
        }
        auto cost = objective_cost(f.inst, r.schedule);
        if (!cost.negative_load_slots.empty()) continue;
        auto m = build_deterministic_model(f.inst);
        Assignment x;
        try {
            x = encode_schedule(m, f.inst, r.schedule);
        } catch (std::invalid_argument const&) {
            continue;  // optimum uses an after-hours start the model prunes
        }
        auto c = check_assignment(m, x);
        EXPECT_TRUE(c.feasible) << "seed " << seed;
        double eta = cost.peak_load;
        EXPECT_NEAR(c.objective - r.objective, 0.005 * (std::ceil(eta) * std::ceil(eta) - eta * eta), 1e-6);
        ++checked;
    }
    EXPECT_GT(checked, 5);
}

TEST(MipSaa, SingleScenarioMatchesTheDeterministicModel) {
    auto inst = golden::micro_instance();
    auto det = build_deterministic_model(inst);
    auto saa = build_saa_model(inst, {inst.net_base_load});
    ASSERT_EQ(det.vars.size(), saa.vars.size());
    ASSERT_EQ(det.rows.size(), saa.rows.size());
    for (std::size_t j = 0; j < det.vars.size(); ++j) {
        EXPECT_EQ(det.vars[j].kind, saa.vars[j].kind);
        EXPECT_EQ(det.vars[j].lb, saa.vars[j].lb);
        EXPECT_EQ(det.vars[j].ub, saa.vars[j].ub);
    }
    for (std::size_t r = 0; r < det.rows.size(); ++r) {
        EXPECT_EQ(det.rows[r].terms, saa.rows[r].terms);
        EXPECT_EQ(det.rows[r].rhs, saa.rows[r].rhs);
    }
    EXPECT_EQ(det.objective, saa.objective);
    EXPECT_GE(saa.find("ell_0_3"), 0);
    EXPECT_GE(saa.find("lambda_0_1"), 0);
}

TEST(MipSaa, ObjectiveIsTheScenarioMean) {
    auto inst = golden::micro_instance();
    std::vector<double> a = inst.net_base_load, b = inst.net_base_load;
    for (double& v : b) v += 4.0;
    auto m = build_saa_model(inst, {a, b});
    auto s = heuristics::construct_initial(inst);
    auto x = encode_schedule(m, inst, s);
    auto r = check_assignment(m, x);
    EXPECT_TRUE(r.feasible);
    double ea = objective_cost(inst, s).peak_load;
    auto inst_b = inst;
    inst_b.net_base_load = b;
    double eb = objective_cost(inst_b, s).peak_load;
    double want = saa_cost(inst, s, {a, b}, SaaMode::average) +
                  0.5 * 0.005 * (std::ceil(ea) * std::ceil(ea) - ea * ea + std::ceil(eb) * std::ceil(eb) - eb * eb);
    EXPECT_NEAR(r.objective, want, 1e-9);
    EXPECT_THROW(build_saa_model(inst, {}), std::invalid_argument);
    EXPECT_THROW(build_saa_model(inst, {{1.0, 2.0}}), std::invalid_argument);
}

TEST(MipExport, OneBinaryGoldenFiles) {
    auto m = golden::one_binary_model();
    EXPECT_TRUE(golden::matches("tiny.mps", export_model(m, ExportFormat::mps)));
    EXPECT_TRUE(golden::matches("tiny.lp", export_model(m, ExportFormat::lp)));
}

TEST(MipExport, MicroInstanceGoldenFiles) {
    auto m = build_deterministic_model(golden::micro_instance());
    EXPECT_TRUE(golden::matches("micro.mps", export_model(m, ExportFormat::mps)));
    EXPECT_TRUE(golden::matches("micro.lp", export_model(m, ExportFormat::lp)));
}

TEST(MipExport, ExportIsDeterministic) {
    auto inst = golden::micro_instance();
    EXPECT_EQ(export_model(build_deterministic_model(inst), ExportFormat::mps),
              export_model(build_deterministic_model(inst), ExportFormat::mps));
}

TEST(MipExport, MpsRoundTripPreservesTheModel) {
    auto inst = golden::micro_instance();
    auto m = build_deterministic_model(inst);
    auto parsed = parse_mps(export_model(m, ExportFormat::mps));
    auto view = export_view(m);
    ASSERT_EQ(parsed.vars.size(), view.vars.size());
    for (std::size_t j = 0; j < view.vars.size(); ++j) EXPECT_EQ(parsed.vars[j], view.vars[j]) << view.vars[j].name;
    ASSERT_EQ(parsed.rows.size(), view.rows.size());
    for (std::size_t r = 0; r < view.rows.size(); ++r) {
        EXPECT_EQ(parsed.rows[r].name, view.rows[r].name);
        EXPECT_EQ(parsed.rows[r].sense, view.rows[r].sense);
        EXPECT_EQ(parsed.rows[r].rhs, view.rows[r].rhs);
        auto a = parsed.rows[r].terms, b = view.rows[r].terms;
        auto by_var = [](Term const& x, Term const& y) { return x.var < y.var; };
        std::sort(a.begin(), a.end(), by_var);
        std::sort(b.begin(), b.end(), by_var);
        EXPECT_EQ(a, b) << view.rows[r].name;
    }
    auto x = encode_schedule(m, inst, heuristics::construct_initial(inst));
    EXPECT_NEAR(check_assignment(parsed, x).objective, check_assignment(m, x).objective, 1e-12);
    EXPECT_EQ(export_model(parsed, ExportFormat::mps), export_model(view, ExportFormat::mps));
}

TEST(MipExport, SolutionFileRoundTrip) {
    auto inst = golden::micro_instance();
    auto m = build_deterministic_model(inst);
    auto best = heuristics::solve_exact(inst);
    auto x = encode_schedule(m, inst, best.schedule);
    auto back = import_solution(m, "# solver output\n\n" + write_solution(m, x));
    auto r = check_assignment(m, back);
    EXPECT_TRUE(r.feasible);
    EXPECT_NEAR(r.objective, check_assignment(m, x).objective, 1e-12);
    EXPECT_THROW(import_solution(m, "nosuchvar 1\n"), ParseError);
    EXPECT_THROW(import_solution(m, "w_0 1\nw_0 1\n"), ParseError);
    EXPECT_THROW(import_solution(m, "w_0 one\n"), ParseError);
}

TEST(MipExport, ErrorsAndFormats) {
    EXPECT_THROW(parse_export_format("gms"), std::invalid_argument);
    EXPECT_EQ(parse_export_format("lp"), ExportFormat::lp);
    MipModel m;
    m.add_var("a b", VarKind::continuous, 0, 1);
    m.add_var("a_b", VarKind::continuous, 0, 1);
    EXPECT_THROW(export_model(m, ExportFormat::mps), std::invalid_argument);
    EXPECT_THROW(parse_mps("NAME x\nROWS\n N obj\n"), ParseError);
    EXPECT_THROW(parse_mps("NAME x\nBOGUS\nENDATA\n"), ParseError);
}

TEST(MipExport, PeakLevelsAreContinuousInExports) {
    auto m = build_deterministic_model(golden::micro_instance());
    auto lp = export_model(m, ExportFormat::lp);
    EXPECT_NE(lp.find(" 0 <= lambda_1 <= 1\n"), std::string::npos);
    auto bin = lp.substr(lp.find("Binaries"));
    EXPECT_EQ(bin.find("lambda_"), std::string::npos);
}

TEST(Rooms, SingleActivityGoesToTheOnlyBuilding) {
    auto inst = fixtures::flat_instance(7, 0, 0, 1, 0);
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    EXPECT_EQ(assign_rooms(inst, s).activities[0]->building, 0);
}

TEST(Rooms, SimultaneousActivitiesAreSplitAcrossBuildings) {
    auto inst = fixtures::flat_instance(7, 0, 0, 2, 0);
    inst.buildings.push_back(Building{1, 2, 0, "", ""});
    inst.activities = {fixtures::recurring(0, 2, 2, 0, 1.0), fixtures::recurring(1, 2, 2, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    s.activities[1] = Placement{41, 0};
    auto out = assign_rooms(inst, s);
    EXPECT_NE(out.activities[0]->building, out.activities[1]->building);
    EXPECT_TRUE(check_feasibility(inst, out).empty());
}

TEST(Rooms, ActivityLargerThanAnyBuildingFails) {
    auto inst = fixtures::flat_instance(7, 0, 0, 2, 0);
    inst.buildings.push_back(Building{1, 2, 0, "", ""});
    inst.activities = {fixtures::recurring(0, 2, 3, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    try {
        assign_rooms(inst, s);
        FAIL() << "expected InfeasibleError";
    } catch (InfeasibleError const& e) {
        EXPECT_NE(std::string(e.what()).find("slot 40"), std::string::npos);
    }
}

TEST(Rooms, BacktracksPastAGreedyDeadEnd) {
    auto inst = fixtures::flat_instance(7, 0, 0, 3, 0);
    inst.buildings.push_back(Building{1, 2, 0, "", ""});
    inst.activities = {fixtures::recurring(0, 4, 2, 0, 1.0), fixtures::recurring(1, 2, 1, 0, 1.0),
                       fixtures::recurring(2, 2, 2, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    s.activities[1] = Placement{40, 0};
    s.activities[2] = Placement{42, 0};
    auto out = assign_rooms(inst, s);
    EXPECT_TRUE(check_feasibility(inst, out).empty());
}
