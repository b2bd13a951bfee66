#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace predopt {

inline constexpr char const* kInstanceFormat = "predopt-instance";
inline constexpr char const* kScheduleFormat = "predopt-schedule";
inline constexpr int kFormatVersion = 1;

namespace detail {

using nlohmann::json;

template <class T>
T field(json const& j, char const* key, char const* where) {
    auto it = j.find(key);
    if (it == j.end()) throw DomainError(std::string(where) + ": missing field '" + key + "'");
    try {
        return it->get<T>();
    } catch (json::exception const&) {
        throw DomainError(std::string(where) + ": field '" + key + "' has the wrong type");
    }
}

template <class T>
T field_or(json const& j, char const* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (json::exception const&) {
        throw DomainError(std::string("field '") + key + "' has the wrong type");
    }
}

inline json parse_json(std::string const& text, char const* what) {
    try {
        return json::parse(text);
    } catch (json::parse_error const& e) {
        throw DomainError(std::string(what) + ": " + e.what());
    }
}

inline char const* kind_name(ActivityKind k) { return k == ActivityKind::recurring ? "recurring" : "once_off"; }

}  // namespace detail

inline nlohmann::json to_json(Instance const& inst) {
    using nlohmann::json;
    json j;
    j["format"] = kInstanceFormat;
    j["version"] = kFormatVersion;
    auto const& g = inst.grid;
    j["grid"] = {{"start_date", format_date(g.start_date())},
                 {"num_days", g.num_days()},
                 {"steps_per_day", g.steps_per_day()},
                 {"office_start", g.office_start()},
                 {"office_end", g.office_end()}};
    j["buildings"] = json::array();
    for (auto const& b : inst.buildings)
        j["buildings"].push_back({{"id", b.id},
                                  {"small_rooms", b.small_rooms},
                                  {"large_rooms", b.large_rooms},
                                  {"base_load_series", b.base_load_series},
                                  {"solar_series", b.solar_series}});
    j["activities"] = json::array();
    for (auto const& a : inst.activities)
        j["activities"].push_back({{"id", a.id},
                                   {"kind", detail::kind_name(a.kind)},
                                   {"duration", a.duration},
                                   {"small_rooms", a.small_rooms},
                                   {"large_rooms", a.large_rooms},
                                   {"power", a.power},
                                   {"value", a.value},
                                   {"penalty", a.penalty},
                                   {"prerequisites", a.prerequisites}});
    j["batteries"] = json::array();
    for (std::size_t i = 0; i < inst.batteries.size(); ++i) {
        auto const& b = inst.batteries[i];
        j["batteries"].push_back({{"id", int(i)},
                                  {"capacity", b.capacity},
                                  {"initial", b.initial},
                                  {"max_power", b.max_power},
                                  {"efficiency", b.efficiency}});
    }
    j["price"] = inst.price;
    j["net_base_load"] = inst.net_base_load;
    return j;
}

inline Instance instance_from_json(nlohmann::json const& j) {
    using detail::field;
    using detail::field_or;
    if (!j.is_object()) throw DomainError("instance: expected a JSON object");
    if (field_or<std::string>(j, "format", kInstanceFormat) != kInstanceFormat)
        throw DomainError("instance: unexpected format tag");
    auto gj = field<nlohmann::json>(j, "grid", "instance");
    TimeGrid grid(parse_date(field<std::string>(gj, "start_date", "grid")), field<int>(gj, "num_days", "grid"),
                  field_or<int>(gj, "steps_per_day", TimeGrid::kStandardStepsPerDay),
                  field_or<int>(gj, "office_start", TimeGrid::kStandardOfficeStart),
                  field_or<int>(gj, "office_end", TimeGrid::kStandardOfficeEnd));
    Instance inst{grid, {}, {}, {}, {}, {}};
    for (auto const& bj : field<nlohmann::json>(j, "buildings", "instance")) {
        Building b;
        b.id = field<int>(bj, "id", "building");
        b.small_rooms = field<int>(bj, "small_rooms", "building");
        b.large_rooms = field<int>(bj, "large_rooms", "building");
        b.base_load_series = field_or<std::string>(bj, "base_load_series", "");
        b.solar_series = field_or<std::string>(bj, "solar_series", "");
        inst.buildings.push_back(std::move(b));
    }
    for (auto const& aj : field<nlohmann::json>(j, "activities", "instance")) {
        Activity a;
        a.id = field<int>(aj, "id", "activity");
        auto kind = field<std::string>(aj, "kind", "activity");
        if (kind == "recurring")
            a.kind = ActivityKind::recurring;
        else if (kind == "once_off")
            a.kind = ActivityKind::once_off;
        else
            throw DomainError("activity: unknown kind '" + kind + "'");
        a.duration = field<int>(aj, "duration", "activity");
        a.small_rooms = field<int>(aj, "small_rooms", "activity");
        a.large_rooms = field<int>(aj, "large_rooms", "activity");
        a.power = field<double>(aj, "power", "activity");
        a.value = field_or<double>(aj, "value", 0.0);
        a.penalty = field_or<double>(aj, "penalty", 0.0);
        a.prerequisites = field_or<std::vector<int>>(aj, "prerequisites", {});
        inst.activities.push_back(std::move(a));
    }
    for (auto const& bj : field<nlohmann::json>(j, "batteries", "instance")) {
        Battery b;
        b.capacity = field<double>(bj, "capacity", "battery");
        b.initial = field<double>(bj, "initial", "battery");
        b.max_power = field<double>(bj, "max_power", "battery");
        b.efficiency = field<double>(bj, "efficiency", "battery");
        inst.batteries.push_back(b);
    }
    inst.price = field<std::vector<double>>(j, "price", "instance");
    inst.net_base_load = field<std::vector<double>>(j, "net_base_load", "instance");
    try {
        validate(inst);
    } catch (std::invalid_argument const& e) {
        throw DomainError(e.what());
    }
    return inst;
}

inline nlohmann::json to_json(Instance const& inst, Schedule const& s) {
    using nlohmann::json;
    json j;
    j["format"] = kScheduleFormat;
    j["version"] = kFormatVersion;
    j["recurring"] = json::array();
    j["once_off"] = json::array();
    for (std::size_t i = 0; i < s.activities.size(); ++i) {
        auto const& p = s.activities[i];
        if (!p) continue;
        auto const& a = inst.activities[i];
        json e = {{"activity", int(i)}, {"start", p->start}, {"building", p->building}};
        if (a.recurring()) {
            j["recurring"].push_back(e);
        } else {
            bool after_hours = false;
            for (auto iv : occurrence_slots(inst.grid, a, *p))
                for (int t = iv.begin; t < iv.end; ++t) after_hours = after_hours || !inst.grid.is_office_slot(t);
            e["after_hours"] = after_hours;
            j["once_off"].push_back(e);
        }
    }
    j["batteries"] = json::array();
    for (std::size_t b = 0; b < s.batteries.size(); ++b) {
        std::string actions(s.batteries[b].size(), 'h');
        for (std::size_t t = 0; t < actions.size(); ++t) actions[t] = char(s.batteries[b][t]);
        j["batteries"].push_back({{"battery", int(b)}, {"actions", actions}});
    }
    return j;
}

/// The after_hours flag in files is informational; it is recomputed from the slots.
inline Schedule schedule_from_json(Instance const& inst, nlohmann::json const& j) {
    using detail::field;
    if (!j.is_object()) throw DomainError("schedule: expected a JSON object");
    Schedule s = Schedule::empty(inst);
    int n = int(inst.activities.size());
    auto read_section = [&](char const* name, bool recurring) {
        for (auto const& e : field<nlohmann::json>(j, name, "schedule")) {
            int id = field<int>(e, "activity", name);
            if (id < 0 || id >= n) throw DomainError(std::string(name) + ": unknown activity " + std::to_string(id));
            if (inst.activities[id].recurring() != recurring)
                throw DomainError(std::string(name) + ": activity " + std::to_string(id) + " is in the wrong section");
            if (s.activities[id]) throw DomainError(std::string(name) + ": activity " + std::to_string(id) + " listed twice");
            s.activities[id] = Placement{field<int>(e, "start", name), field<int>(e, "building", name)};
        }
    };
    read_section("recurring", true);
    read_section("once_off", false);
    for (auto const& e : field<nlohmann::json>(j, "batteries", "schedule")) {
        int id = field<int>(e, "battery", "batteries");
        if (id < 0 || id >= int(inst.batteries.size()))
            throw DomainError("batteries: unknown battery " + std::to_string(id));
        auto actions = field<std::string>(e, "actions", "batteries");
        if (int(actions.size()) != inst.grid.total_slots())
            throw DomainError("batteries: battery " + std::to_string(id) + " has " + std::to_string(actions.size()) +
                              " actions, grid has " + std::to_string(inst.grid.total_slots()) + " slots");
        auto& out = s.batteries[id];
        for (std::size_t t = 0; t < actions.size(); ++t) {
            char c = actions[t];
            if (c != 'c' && c != 'h' && c != 'd')
                throw DomainError("batteries: battery " + std::to_string(id) + " slot " + std::to_string(t) +
                                  ": action must be c, h or d");
            out[t] = BatteryAction(c);
        }
    }
    try {
        check_structure(inst, s);
    } catch (std::invalid_argument const& e) {
        throw DomainError(e.what());
    }
    return s;
}

inline std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(std::string const& path, std::string const& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write '" + path + "'");
    out << text;
}

inline std::string dump_instance(Instance const& inst) { return to_json(inst).dump(1) + "\n"; }

inline std::string dump_schedule(Instance const& inst, Schedule const& s) { return to_json(inst, s).dump(1) + "\n"; }

inline Instance parse_instance(std::string const& text) {
    return instance_from_json(detail::parse_json(text, "instance"));
}

inline Schedule parse_schedule(Instance const& inst, std::string const& text) {
    return schedule_from_json(inst, detail::parse_json(text, "schedule"));
}

inline Instance load_instance(std::string const& path) { return parse_instance(read_file(path)); }

inline Schedule load_schedule(Instance const& inst, std::string const& path) {
    return parse_schedule(inst, read_file(path));
}

}  // namespace predopt
