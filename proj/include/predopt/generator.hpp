#pragma once

#include "predopt/core/model.hpp"
#include "predopt/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace predopt {

enum class InstanceSize { small, large };

struct GeneratorParams {
    InstanceSize size = InstanceSize::small;
    std::uint64_t seed = 0;

    int min_duration = 2;
    int max_duration = 10;
    int min_rooms = 1;
    int max_rooms = 3;
    double p_small_room = 0.75;
    double min_power_fraction = 1.0 / 20.0;
    double max_power_fraction = 1.0 / 10.0;
    double min_value_multiplier = 0.9;
    double max_value_multiplier = 1.5;
    double p_precedence_recurring = 0.25;
    double p_precedence_onceoff = 0.1;
    int max_precedence_trials = 4;
    double min_penalty_fraction = 0.2;
    double max_penalty_fraction = 0.5;

    int num_batteries = 2;
    Battery battery{300.0, 0.0, 150.0, 0.81};

    int recurring_count() const { return size == InstanceSize::small ? 50 : 200; }
    int onceoff_count() const { return size == InstanceSize::small ? 20 : 100; }

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!prob(p_small_room) || !prob(p_precedence_recurring) || !prob(p_precedence_onceoff))
            throw std::invalid_argument("generator probabilities must lie in [0, 1]");
        if (min_duration < 1 || min_duration > max_duration) throw std::invalid_argument("empty duration range");
        if (min_rooms < 1 || min_rooms > max_rooms) throw std::invalid_argument("empty room range");
        if (min_power_fraction < 0 || min_power_fraction > max_power_fraction)
            throw std::invalid_argument("empty power range");
        if (min_value_multiplier < 0 || min_value_multiplier > max_value_multiplier)
            throw std::invalid_argument("empty value multiplier range");
        if (min_penalty_fraction < 0 || min_penalty_fraction > max_penalty_fraction)
            throw std::invalid_argument("empty penalty range");
        if (max_precedence_trials < 0 || num_batteries < 0) throw std::invalid_argument("negative count");
    }
};

struct NamedSeries {
    std::string name;
    std::vector<double> values;
};

/// Per-building base load, solar production and price, each covering the grid.
struct BaseSeries {
    std::vector<NamedSeries> building_load;  // kW
    std::vector<NamedSeries> solar;          // kW
    std::vector<double> price;               // $/MWh per 15-minute slot
};

/// Half-hourly prices become two identical 15-minute slots.
inline std::vector<double> expand_half_hourly(std::vector<double> const& half_hourly) {
    std::vector<double> out;
    out.reserve(half_hourly.size() * 2);
    for (double p : half_hourly) {
        out.push_back(p);
        out.push_back(p);
    }
    return out;
}

/// Campus-like stand-in data: weekday office bumps on the building loads,
/// daylight bells with daily cloudiness for solar, and a double-peaked
/// half-hourly price with rare spikes.
inline BaseSeries synthetic_base_series(TimeGrid const& grid, std::uint64_t seed, int num_buildings = 6,
                                        int num_solar = 6) {
    std::mt19937_64 rng(seed ^ 0x5eed5e1e5ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int T = grid.total_slots();
    int spd = grid.steps_per_day();
    BaseSeries out;
    for (int b = 0; b < num_buildings; ++b) {
        double level = 60.0 + 190.0 * unit(rng);
        NamedSeries s{"Building" + std::to_string(b), std::vector<double>(T)};
        for (int t = 0; t < T; ++t) {
            double hour = 24.0 * (t % spd) / spd;
            bool weekday = grid.is_weekday(t / spd);
            double shape = 0.7;
            if (hour >= 7.0 && hour < 19.0) shape = weekday ? 1.6 : 0.85;
            s.values[t] = level * shape * (0.95 + 0.1 * unit(rng));
        }
        out.building_load.push_back(std::move(s));
    }
    for (int k = 0; k < num_solar; ++k) {
        double peak = 20.0 + 60.0 * unit(rng);
        NamedSeries s{"Solar" + std::to_string(k), std::vector<double>(T, 0.0)};
        double cloud = 1.0;
        for (int t = 0; t < T; ++t) {
            if (t % spd == 0) cloud = 0.3 + 0.7 * unit(rng);
            double hour = 24.0 * (t % spd) / spd;
            if (hour > 6.0 && hour < 19.0)
                s.values[t] = peak * cloud * std::sin(std::numbers::pi * (hour - 6.0) / 13.0);
        }
        out.solar.push_back(std::move(s));
    }
    std::vector<double> half((T + 1) / 2);
    for (std::size_t i = 0; i < half.size(); ++i) {
        double hour = 24.0 * double((2 * i) % spd) / spd;
        double shape = 45.0 + 20.0 * std::exp(-std::pow(hour - 8.0, 2) / 4.0) +
                       45.0 * std::exp(-std::pow(hour - 18.5, 2) / 3.0);
        double p = shape * (0.85 + 0.3 * unit(rng));
        if (unit(rng) < 0.01) p *= 5.0;
        half[i] = std::round(p * 100.0) / 100.0;
    }
    out.price = expand_half_hourly(half);
    out.price.resize(T);
    return out;
}

struct RoomTotals {
    int small = 0;
    int large = 0;

    friend bool operator==(RoomTotals const&, RoomTotals const&) = default;
};

/// Peak simultaneous room demand of the recurring activities, per size class.
inline RoomTotals derive_room_limits(Instance const& inst, Schedule const& tentative) {
    int T = inst.grid.total_slots();
    std::vector<int> small(T, 0), large(T, 0);
    for (auto const& a : inst.activities) {
        auto const& p = tentative.activities.at(a.id);
        if (!a.recurring() || !p) continue;
        for (auto iv : occurrence_slots(inst.grid, a, *p))
            for (int t = iv.begin; t < iv.end; ++t) {
                small[t] += a.small_rooms;
                large[t] += a.large_rooms;
            }
    }
    RoomTotals r;
    if (T > 0) {
        r.small = *std::max_element(small.begin(), small.end());
        r.large = *std::max_element(large.begin(), large.end());
    }
    return r;
}

/// For every activity, prerequisites drawn without replacement from the
/// same-kind activities on strictly earlier tentative days. The draw count
/// is Binomial(min(|candidates|, max_trials), p). Ids come back sorted.
template <class Rng>
std::vector<std::vector<int>> sample_precedences(Instance const& inst, Schedule const& tentative,
                                                 GeneratorParams const& params, Rng& rng) {
    auto const& grid = inst.grid;
    std::vector<std::vector<int>> out(inst.activities.size());
    for (auto const& a : inst.activities) {
        auto const& p = tentative.activities.at(a.id);
        if (!p) throw std::invalid_argument("tentative schedule must place every activity");
        int day = precedence_day(grid, *p);
        std::vector<int> candidates;
        for (auto const& other : inst.activities) {
            auto const& q = tentative.activities[other.id];
            if (other.kind == a.kind && q && precedence_day(grid, *q) < day) candidates.push_back(other.id);
        }
        int trials = std::min<int>(int(candidates.size()), params.max_precedence_trials);
        if (trials == 0) continue;
        double prob = a.recurring() ? params.p_precedence_recurring : params.p_precedence_onceoff;
        int k = std::binomial_distribution<int>(trials, prob)(rng);
        for (int i = 0; i < k; ++i) {
            int j = std::uniform_int_distribution<int>(i, int(candidates.size()) - 1)(rng);
            std::swap(candidates[i], candidates[j]);
        }
        out[a.id].assign(candidates.begin(), candidates.begin() + k);
        std::sort(out[a.id].begin(), out[a.id].end());
    }
    return out;
}

struct GeneratedInstance {
    Instance instance;
    Schedule tentative;  // recurring and once-off placements used during construction
};

/// Drops the once-off placements; the rest is feasible by construction.
inline Schedule recurring_only(Instance const& inst, Schedule s) {
    for (auto const& a : inst.activities)
        if (!a.recurring()) s.activities[a.id].reset();
    return s;
}

/// Recurring placements plus every once-off placement that can be kept
/// without a violation, added in id order until nothing more fits.
inline Schedule feasible_tentative(Instance const& inst, Schedule const& tentative) {
    Schedule s = recurring_only(inst, tentative);
    for (bool grew = true; grew;) {
        grew = false;
        for (auto const& a : inst.activities) {
            if (a.recurring() || s.activities[a.id] || !tentative.activities[a.id]) continue;
            s.activities[a.id] = tentative.activities[a.id];
            if (check_feasibility(inst, s).empty()) grew = true;
            else s.activities[a.id].reset();
        }
    }
    return s;
}

/// Three stages: sample activities with a tentative weekday placement inside
/// the first-Monday week, sample precedences consistent with that placement,
/// then size the rooms to the recurring peak.
///
/// Draw order: per activity in id order (duration, rooms, room size, power,
/// [value multiplier, penalty fraction], weekday, start), then precedences in
/// id order, then the solar series assignment.
inline GeneratedInstance generate_instance(GeneratorParams const& params, BaseSeries const& base,
                                           TimeGrid const& grid) {
    params.validate();
    int T = grid.total_slots();
    int spd = grid.steps_per_day();
    int B = int(base.building_load.size());
    if (B < 1) throw std::invalid_argument("need at least one building series");
    if (base.solar.empty()) throw std::invalid_argument("need at least one solar series");
    if (int(base.price.size()) != T) throw std::invalid_argument("price series does not cover the grid");
    for (auto const& s : base.building_load)
        if (int(s.values.size()) != T) throw std::invalid_argument("building series does not cover the grid");
    for (auto const& s : base.solar)
        if (int(s.values.size()) != T) throw std::invalid_argument("solar series does not cover the grid");
    if (grid.first_monday_offset() + 5 * spd > T)
        throw std::invalid_argument("grid too small: first Monday-to-Friday week does not fit");
    if (params.max_duration > grid.office_slots_per_day())
        throw std::invalid_argument("grid too small: longest activity exceeds the office window");

    std::mt19937_64 rng(params.seed);
    using real = std::uniform_real_distribution<double>;
    using integer = std::uniform_int_distribution<int>;

    double max_base = 0.0;
    for (auto const& s : base.building_load)
        for (double v : s.values) max_base = std::max(max_base, v);
    double avg_price = 0.0;
    for (double p : base.price) avg_price += p;
    avg_price /= double(T);

    Instance inst{grid, {}, {}, {}, base.price, std::vector<double>(T, 0.0)};
    Schedule tentative;
    int n_rec = params.recurring_count();
    int n = n_rec + params.onceoff_count();
    for (int id = 0; id < n; ++id) {
        Activity a;
        a.id = id;
        a.kind = id < n_rec ? ActivityKind::recurring : ActivityKind::once_off;
        a.duration = integer(params.min_duration, params.max_duration)(rng);
        int rooms = integer(params.min_rooms, params.max_rooms)(rng);
        bool small = std::bernoulli_distribution(params.p_small_room)(rng);
        (small ? a.small_rooms : a.large_rooms) = rooms;
        a.power = real(params.min_power_fraction * max_base, params.max_power_fraction * max_base)(rng);
        if (!a.recurring()) {
            double energy_mwh = a.load() * a.duration * TimeGrid::kHoursPerSlot / 1000.0;
            a.value = real(params.min_value_multiplier, params.max_value_multiplier)(rng) * avg_price * energy_mwh;
            a.penalty = real(params.min_penalty_fraction, params.max_penalty_fraction)(rng) * a.value;
        }
        int day = integer(0, 4)(rng);
        int sod = integer(grid.office_start(), grid.office_end() - a.duration)(rng);
        int rel = day * spd + sod;
        int start = a.recurring() ? rel : grid.first_monday_offset() + rel;
        tentative.activities.push_back(Placement{start, id % B});
        inst.activities.push_back(std::move(a));
    }

    auto prereqs = sample_precedences(inst, tentative, params, rng);
    for (auto& a : inst.activities) a.prerequisites = std::move(prereqs[a.id]);

    // Rooms per building cover that building's recurring peak under the
    // round-robin activity split, so the tentative schedule stays feasible.
    inst.buildings.resize(B);
    for (int b = 0; b < B; ++b) {
        Schedule mine = tentative;
        for (auto const& a : inst.activities)
            if (tentative.activities[a.id]->building != b) mine.activities[a.id].reset();
        auto limits = derive_room_limits(inst, mine);
        inst.buildings[b] = Building{b, limits.small, limits.large, base.building_load[b].name, ""};
    }

    std::vector<int> solar(base.solar.size());
    for (std::size_t k = 0; k < solar.size(); ++k) solar[k] = int(k);
    std::shuffle(solar.begin(), solar.end(), rng);
    for (int b = 0; b < B; ++b) {
        auto const& sol = base.solar[solar[b % solar.size()]];
        inst.buildings[b].solar_series = sol.name;
        for (int t = 0; t < T; ++t) inst.net_base_load[t] += base.building_load[b].values[t] - sol.values[t];
    }

    for (int i = 0; i < params.num_batteries; ++i) inst.batteries.push_back(params.battery);
    tentative.batteries.assign(inst.batteries.size(), std::vector<BatteryAction>(T, BatteryAction::hold));
    validate(inst);
    return {std::move(inst), std::move(tentative)};
}

}  // namespace predopt
