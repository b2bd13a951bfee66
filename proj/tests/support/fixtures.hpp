#pragma once

#include "predopt/core/model.hpp"

#include <vector>

namespace fixtures {

using namespace predopt;

/// Standard-grid instance starting on Monday 2020-11-02 with flat price and
/// base load and one building.
inline Instance flat_instance(int days = 7, double price = 40.0, double base = 100.0, int small = 4, int large = 2) {
    Instance inst{build_time_grid(make_date(2020, 11, 2), days), {Building{0, small, large, "Building0", "Solar0"}},
                  {}, {}, {}, {}};
    inst.price.assign(inst.grid.total_slots(), price);
    inst.net_base_load.assign(inst.grid.total_slots(), base);
    return inst;
}

inline Activity recurring(int id, int duration, int small, int large, double power, std::vector<int> pre = {}) {
    Activity a;
    a.id = id;
    a.duration = duration;
    a.small_rooms = small;
    a.large_rooms = large;
    a.power = power;
    a.prerequisites = std::move(pre);
    return a;
}

inline Activity once_off(int id, int duration, int small, int large, double power, double value, double penalty,
                         std::vector<int> pre = {}) {
    Activity a = recurring(id, duration, small, large, power, std::move(pre));
    a.kind = ActivityKind::once_off;
    a.value = value;
    a.penalty = penalty;
    return a;
}

/// Four-slot single-day grid, every slot inside office hours.
inline Instance four_slot_instance(std::vector<double> price, std::vector<double> base) {
    Instance inst{TimeGrid(make_date(2024, 1, 1), 1, 4, 0, 4), {Building{0, 1, 1, "", ""}}, {}, {}, {}, {}};
    inst.price = std::move(price);
    inst.net_base_load = std::move(base);
    return inst;
}

}  // namespace fixtures
