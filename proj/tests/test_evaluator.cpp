#include "predopt/evaluator.hpp"
#include "support/fixtures.hpp"
#include "support/micro.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace predopt;
using fixtures::flat_instance;
using fixtures::four_slot_instance;

namespace {

bool has_kind(std::vector<Violation> const& v, ViolationKind k) {
    return std::any_of(v.begin(), v.end(), [&](Violation const& x) { return x.kind == k; });
}

}  // namespace

TEST(Objective, FourFlatSlotsCostFiftyFourDollars) {
    auto inst = four_slot_instance({40, 40, 40, 40}, {100, 100, 100, 100});
    auto c = objective_cost(inst, Schedule::empty(inst));
    EXPECT_NEAR(c.energy_cost, 4.00, 1e-12);
    EXPECT_NEAR(c.demand_charge, 50.00, 1e-12);
    EXPECT_NEAR(c.total, 54.00, 1e-12);
    EXPECT_DOUBLE_EQ(c.peak_load, 100.0);
}

TEST(Objective, EmptyScheduleOnZeroLoadCostsNothing) {
    auto inst = four_slot_instance({40, 10, -5, 0}, {0, 0, 0, 0});
    EXPECT_EQ(objective_cost(inst, Schedule::empty(inst)).total, 0.0);
}

TEST(Objective, AfterHoursOnceOffEarnsValueMinusPenalty) {
    auto inst = flat_instance(7, 0.0, 0.0);
    inst.activities = {fixtures::once_off(0, 2, 1, 0, 0.0, 120.0, 30.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{10, 0};
    auto c = objective_cost(inst, s);
    EXPECT_DOUBLE_EQ(c.onceoff_profit, 90.0);
    EXPECT_DOUBLE_EQ(c.total, -90.0);

    s.activities[0] = Placement{40, 0};
    EXPECT_DOUBLE_EQ(objective_cost(inst, s).onceoff_profit, 120.0);

    s.activities[0] = Placement{67, 0};  // runs into 17:00
    EXPECT_DOUBLE_EQ(objective_cost(inst, s).onceoff_profit, 90.0);
}

TEST(Objective, DemandChargeIsZeroForExportOnlyProfiles) {
    auto inst = four_slot_instance({40, 40, 40, 40}, {-10, -20, -5, -1});
    auto c = objective_cost(inst, Schedule::empty(inst));
    EXPECT_EQ(c.demand_charge, 0.0);
    EXPECT_DOUBLE_EQ(c.peak_load, -1.0);
    EXPECT_EQ(c.negative_load_slots, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Objective, MatchesExactIntegerArithmeticOnMicroFixtures) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto f = micro::make_fixture(seed);
        std::mt19937_64 rng(seed);
        auto s = Schedule::empty(f.inst);
        for (auto const& a : f.inst.activities) {
            int limit = a.recurring() ? f.inst.grid.week_slots() : f.inst.grid.total_slots();
            int start = std::uniform_int_distribution<int>(0, limit - a.duration)(rng);
            if (a.recurring() || rng() % 2) s.activities[a.id] = Placement{start, 0};
        }
        for (auto& plan : s.batteries)
            for (auto& x : plan) x = BatteryAction("chd"[rng() % 3]);
        double want = double(micro::scaled_cost(f, s)) / 4000.0;
        EXPECT_NEAR(objective_cost(f.inst, s).total, want, 1e-9 * (1 + std::abs(want))) << "seed " << seed;
    }
}

TEST(NetLoad, BatteryChargeAndDischargeContributions) {
    auto inst = four_slot_instance({0, 0, 0, 0}, {0, 0, 0, 0});
    inst.batteries = {Battery{300, 150, 150, 0.81}};
    auto s = Schedule::empty(inst);
    s.batteries[0] = {BatteryAction::charge, BatteryAction::discharge, BatteryAction::hold, BatteryAction::hold};
    auto load = battery_load_profile(inst, s);
    EXPECT_NEAR(load[0], 166.667, 1e-3);
    EXPECT_NEAR(load[0], 150.0 / 0.9, 1e-12);
    EXPECT_NEAR(load[1], -135.0, 1e-12);
    EXPECT_EQ(load[2], 0.0);
}

TEST(NetLoad, ActivityContributesPowerTimesRooms) {
    auto inst = flat_instance(7, 0.0, 0.0);
    inst.activities = {fixtures::recurring(0, 3, 2, 1, 10.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    auto load = net_load_profile(inst, s);
    EXPECT_EQ(load[39], 0.0);
    EXPECT_EQ(load[40], 30.0);
    EXPECT_EQ(load[42], 30.0);
    EXPECT_EQ(load[43], 0.0);
}

TEST(NetLoad, RecurringRepeatsWeeklyFromTheFirstMonday) {
    Instance inst{build_time_grid(make_date(2020, 10, 1), 31), {Building{0, 4, 2, "", ""}}, {}, {}, {}, {}};
    inst.price.assign(2976, 0.0);
    inst.net_base_load.assign(2976, 0.0);
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 5.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{36, 0};
    auto load = net_load_profile(inst, s);
    int busy = 0;
    for (double v : load) busy += v > 0;
    EXPECT_EQ(busy, 8);
    EXPECT_EQ(load[384 + 36], 5.0);
    EXPECT_EQ(load[384 + 672 * 3 + 37], 5.0);
    EXPECT_EQ(load[36], 0.0);
}

TEST(SocTrace, ChargeTwiceFromEmpty) {
    auto inst = four_slot_instance({0, 0, 0, 0}, {0, 0, 0, 0});
    inst.batteries = {Battery{300, 0, 150, 1.0}};
    auto s = Schedule::empty(inst);
    s.batteries[0] = {BatteryAction::charge, BatteryAction::charge, BatteryAction::hold, BatteryAction::hold};
    auto soc = battery_soc_trace(inst, s, 0);
    EXPECT_EQ(soc, (std::vector<double>{37.5, 75.0, 75.0, 75.0}));
}

TEST(SocTrace, HoldKeepsTheInitialCharge) {
    auto inst = four_slot_instance({0, 0, 0, 0}, {0, 0, 0, 0});
    inst.batteries = {Battery{300, 112.5, 150, 0.9}};
    auto soc = battery_soc_trace(inst, Schedule::empty(inst), 0);
    EXPECT_EQ(soc, std::vector<double>(4, 112.5));
}

TEST(SocTrace, SingleDischargeEmptiesAQuarter) {
    Instance inst{TimeGrid(make_date(2024, 1, 1), 1, 1, 0, 1), {Building{0, 1, 1, "", ""}}, {}, {}, {0.0}, {0.0}};
    inst.batteries = {Battery{300, 37.5, 150, 1.0}};
    auto s = Schedule::empty(inst);
    s.batteries[0] = {BatteryAction::discharge};
    EXPECT_EQ(battery_soc_trace(inst, s, 0), (std::vector<double>{0.0}));
    EXPECT_THROW(battery_soc_trace(inst, s, 1), std::invalid_argument);
}

TEST(Feasibility, RecurringStartAtQuarterToNine) {
    auto inst = flat_instance();
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{35, 0};
    auto v = check_feasibility(inst, s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, ViolationKind::StartBefore9);
}

TEST(Feasibility, RecurringWindowBoundaries) {
    auto inst = flat_instance();
    inst.activities = {fixtures::recurring(0, 4, 1, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{64, 0};
    EXPECT_TRUE(check_feasibility(inst, s).empty());
    s.activities[0] = Placement{65, 0};
    EXPECT_TRUE(has_kind(check_feasibility(inst, s), ViolationKind::EndAfter17));
    s.activities[0] = Placement{5 * 96 + 40, 0};
    EXPECT_TRUE(has_kind(check_feasibility(inst, s), ViolationKind::WeekendStart));
    s.activities[0] = Placement{671, 0};
    EXPECT_TRUE(has_kind(check_feasibility(inst, s), ViolationKind::CrossesWeekBoundary));
    s.activities[0] = std::nullopt;
    EXPECT_TRUE(has_kind(check_feasibility(inst, s), ViolationKind::RecurringUnscheduled));
}

TEST(Feasibility, RecurringMustHaveAnOccurrenceInTheGrid) {
    Instance inst{build_time_grid(make_date(2020, 11, 4), 7), {Building{0, 1, 0, "", ""}}, {}, {}, {}, {}};
    inst.price.assign(672, 0.0);
    inst.net_base_load.assign(672, 0.0);
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{2 * 96 + 40, 0};  // Wednesday of the week from Monday 9 Nov: past the grid
    EXPECT_TRUE(has_kind(check_feasibility(inst, s), ViolationKind::RecStartOutsideFirstWeek));
    s.activities[0] = Placement{40, 0};  // Monday 9 Nov fits
    EXPECT_TRUE(check_feasibility(inst, s).empty());
}

TEST(Feasibility, OnceOffPrerequisiteSameDay) {
    auto inst = flat_instance();
    inst.activities = {fixtures::once_off(0, 2, 1, 0, 1.0, 10, 0), fixtures::once_off(1, 2, 1, 0, 1.0, 10, 0, {0})};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{96 + 40, 0};
    s.activities[1] = Placement{96 + 50, 0};
    auto v = check_feasibility(inst, s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, ViolationKind::PrecedenceViolated);
    EXPECT_EQ(v[0].id, 1);
    EXPECT_EQ(v[0].other, 0);

    s.activities[1] = Placement{2 * 96 + 10, 0};
    EXPECT_TRUE(check_feasibility(inst, s).empty());

    s.activities[0] = std::nullopt;
    EXPECT_TRUE(has_kind(check_feasibility(inst, s), ViolationKind::PrereqUnscheduled));

    s.activities[1] = std::nullopt;
    EXPECT_TRUE(check_feasibility(inst, s).empty());
}

TEST(Feasibility, RecurringPrecedenceUsesTheWeekday) {
    auto inst = flat_instance();
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0), fixtures::recurring(1, 2, 1, 0, 1.0, {0})};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{96 + 40, 0};
    s.activities[1] = Placement{40, 0};
    EXPECT_TRUE(has_kind(check_feasibility(inst, s), ViolationKind::PrecedenceViolated));
    s.activities[1] = Placement{2 * 96 + 36, 0};
    EXPECT_TRUE(check_feasibility(inst, s).empty());
}

TEST(Feasibility, RoomsAreCountedPerBuildingAndType) {
    auto inst = flat_instance(7, 0, 0, 2, 1);
    inst.buildings.push_back(Building{1, 1, 0, "", ""});
    inst.activities = {fixtures::recurring(0, 4, 2, 0, 1.0), fixtures::recurring(1, 4, 0, 1, 1.0),
                       fixtures::once_off(2, 2, 1, 0, 1.0, 5, 0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    s.activities[1] = Placement{40, 0};
    EXPECT_TRUE(check_feasibility(inst, s).empty());
    s.activities[2] = Placement{42, 0};
    auto v = check_feasibility(inst, s);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].kind, ViolationKind::RoomOverbooked);
    EXPECT_EQ(v[0].id, 0);
    EXPECT_EQ(v[0].slot, 42);
    s.activities[2] = Placement{42, 1};
    EXPECT_TRUE(check_feasibility(inst, s).empty());
    s.activities[2] = Placement{44, 0};
    EXPECT_TRUE(check_feasibility(inst, s).empty());
}

TEST(Feasibility, ChargingFromFullOverflowsAtTheFirstSlot) {
    auto inst = four_slot_instance({0, 0, 0, 0}, {0, 0, 0, 0});
    inst.batteries = {Battery{100, 100, 50, 1.0}};
    auto s = Schedule::empty(inst);
    s.batteries[0].assign(4, BatteryAction::charge);
    auto v = check_feasibility(inst, s);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].kind, ViolationKind::BatterySoCOver);
    EXPECT_EQ(v[0].slot, 0);
    EXPECT_EQ(v.size(), 4u);
}

TEST(Feasibility, DischargingBelowEmpty) {
    auto inst = four_slot_instance({0, 0, 0, 0}, {0, 0, 0, 0});
    inst.batteries = {Battery{100, 12.5, 50, 1.0}};
    auto s = Schedule::empty(inst);
    s.batteries[0] = {BatteryAction::discharge, BatteryAction::discharge, BatteryAction::charge, BatteryAction::hold};
    auto v = check_feasibility(inst, s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], (Violation{ViolationKind::BatterySoCUnder, 0, 1, -1}));
}

TEST(Feasibility, ReportsEveryViolation) {
    auto inst = flat_instance();
    inst.activities = {fixtures::recurring(0, 2, 1, 0, 1.0), fixtures::recurring(1, 2, 1, 0, 1.0)};
    auto s = Schedule::empty(inst);
    s.activities[1] = Placement{6 * 96, 0};
    auto v = check_feasibility(inst, s);
    EXPECT_TRUE(has_kind(v, ViolationKind::RecurringUnscheduled));
    EXPECT_TRUE(has_kind(v, ViolationKind::WeekendStart));
    EXPECT_TRUE(has_kind(v, ViolationKind::StartBefore9));
    EXPECT_GE(v.size(), 3u);
    EXPECT_NE(describe(v[0]).find("activity="), std::string::npos);
}

TEST(Feasibility, StructuralErrorsThrow) {
    auto inst = flat_instance();
    auto s = Schedule::empty(inst);
    s.activities.push_back(Placement{0, 0});
    EXPECT_THROW(check_feasibility(inst, s), std::invalid_argument);
    EXPECT_THROW(objective_cost(inst, s), std::invalid_argument);
}

TEST(Saa, IdenticalScenariosMatchTheDeterministicCost) {
    auto f = micro::make_fixture(11);
    auto s = Schedule::empty(f.inst);
    s.batteries[0][0] = BatteryAction::charge;
    double det = objective_cost(f.inst, s).total;
    std::vector<std::vector<double>> sc(3, f.inst.net_base_load);
    EXPECT_NEAR(saa_cost(f.inst, s, sc, SaaMode::average), det, 1e-9);
    EXPECT_NEAR(saa_cost(f.inst, s, sc, SaaMode::worst_case), det, 1e-9);
}

TEST(Saa, WorstCaseAndAverage) {
    auto inst = four_slot_instance({40, 40, 40, 40}, {100, 100, 100, 100});
    std::vector<double> a(4, 100.0), b(4, 200.0);
    double ca = 54.0;
    double cb = 4 * 0.25 * 200 / 1000 * 40 + 0.005 * 200 * 200;
    auto s = Schedule::empty(inst);
    EXPECT_NEAR(saa_cost(inst, s, {a, b}, SaaMode::worst_case), cb, 1e-12);
    EXPECT_NEAR(saa_cost(inst, s, {a, b}, SaaMode::average), (ca + cb) / 2, 1e-12);
    EXPECT_THROW(saa_cost(inst, s, {}, SaaMode::average), std::invalid_argument);
    EXPECT_THROW(saa_cost(inst, s, {{1.0}}, SaaMode::average), std::invalid_argument);
}

TEST(Saa, ProfitIsCountedOnce) {
    auto inst = flat_instance(7, 0, 0);
    inst.activities = {fixtures::once_off(0, 1, 1, 0, 0.0, 50.0, 0.0)};
    auto s = Schedule::empty(inst);
    s.activities[0] = Placement{40, 0};
    std::vector<std::vector<double>> sc(4, inst.net_base_load);
    EXPECT_DOUBLE_EQ(saa_cost(inst, s, sc, SaaMode::average), -50.0);
}

TEST(GridCharges, FusedFormAgreesWithMaterialisedProfile) {
    std::vector<double> base{1.5, -2.25, 300, 7}, bat{166.0, -135.0, 0, 0}, act{0, 12, 0.5, 30}, price{40, -3, 12, 0};
    auto a = grid_charges(assemble_net_load(base, bat, act), price);
    auto b = grid_charges(base, bat, act, price);
    EXPECT_EQ(a.energy_cost, b.energy_cost);
    EXPECT_EQ(a.demand_charge, b.demand_charge);
}
