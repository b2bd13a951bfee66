#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/core/time_grid.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace predopt {

inline bool is_missing(double v) { return std::isnan(v); }
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

enum class SeriesRole { building_load, solar, price, other };

inline SeriesRole role_from_name(std::string_view name) {
    auto starts = [&](std::string_view prefix) {
        if (name.size() < prefix.size()) return false;
        for (std::size_t i = 0; i < prefix.size(); ++i)
            if (std::tolower(static_cast<unsigned char>(name[i])) != prefix[i]) return false;
        return true;
    };
    if (starts("building")) return SeriesRole::building_load;
    if (starts("solar")) return SeriesRole::solar;
    if (starts("price")) return SeriesRole::price;
    return SeriesRole::other;
}

using Timestamp = std::chrono::sys_time<std::chrono::minutes>;

inline Timestamp make_timestamp(Date date, int minute_of_day = 0) {
    return std::chrono::sys_days{date} + std::chrono::minutes{minute_of_day};
}

inline std::string format_timestamp(Timestamp ts) {
    auto day = std::chrono::floor<std::chrono::days>(ts);
    std::chrono::hh_mm_ss hms{ts - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s %02d-%02d-00", format_date(Date{day}).c_str(), int(hms.hours().count()),
                  int(hms.minutes().count()));
    return buf;
}

/// One 15-minute series; missing values are quiet NaN.
struct Series {
    std::string name;
    Timestamp start{};
    std::vector<double> values;

    SeriesRole role() const { return role_from_name(name); }

    friend bool operator==(Series const& a, Series const& b) {
        if (a.name != b.name || a.start != b.start || a.values.size() != b.values.size()) return false;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            bool ma = is_missing(a.values[i]), mb = is_missing(b.values[i]);
            if (ma != mb || (!ma && a.values[i] != b.values[i])) return false;
        }
        return true;
    }
};

struct SeriesSet {
    std::string relation;
    std::optional<int> horizon;
    std::vector<Series> series;

    Series const* find(std::string_view name) const {
        for (auto const& s : series)
            if (s.name == name) return &s;
        return nullptr;
    }

    friend bool operator==(SeriesSet const&, SeriesSet const&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline Timestamp parse_timestamp(std::string_view text, int line, int column) {
    int y = 0;
    unsigned mo = 0, d = 0;
    int h = 0, mi = 0, sec = 0;
    char tail = 0;
    std::string buf(text);
    if (std::sscanf(buf.c_str(), "%d-%u-%u %d-%d-%d%c", &y, &mo, &d, &h, &mi, &sec, &tail) != 6)
        throw ParseError("expected timestamp 'YYYY-MM-DD HH-MM-SS', got '" + buf + "'", line, column);
    Date date{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if (!date.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 59)
        throw ParseError("timestamp out of range: '" + buf + "'", line, column);
    if (mi % 15 != 0 || sec != 0)
        throw ParseError("ragged timestamp '" + buf + "' is off the 15-minute lattice", line, column);
    return make_timestamp(date, h * 60 + mi);
}

}  // namespace detail

/// Header lines start with '@' and end at '@data'; '#' lines are comments.
/// Each data line is `name:YYYY-MM-DD HH-MM-SS:v1,v2,...` with `?` for a
/// missing value.
inline SeriesSet parse_tsf(std::string_view text) {
    SeriesSet out;
    bool in_data = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            if (nl == text.size()) break;
            continue;
        }
        if (!in_data) {
            if (line.front() != '@') throw ParseError("malformed header: expected '@' directive", line_no, 1);
            std::string_view body = line.substr(1);
            std::size_t sp = body.find_first_of(" \t");
            std::string_view key = body.substr(0, sp);
            std::string_view arg = sp == std::string_view::npos ? std::string_view{} : detail::trim(body.substr(sp));
            if (key == "data") {
                in_data = true;
            } else if (key == "relation") {
                out.relation = std::string(arg);
            } else if (key == "horizon") {
                int h = 0;
                auto r = std::from_chars(arg.data(), arg.data() + arg.size(), h);
                if (r.ec != std::errc{} || r.ptr != arg.data() + arg.size() || h < 0)
                    throw ParseError("malformed header: bad @horizon", line_no, int(sp) + 3);
                out.horizon = h;
            } else if (key == "frequency") {
                if (arg != "15_minutes" && arg != "15min")
                    throw ParseError("malformed header: only 15-minute frequency is supported", line_no, int(sp) + 3);
            } else if (key == "attribute" || key == "missing" || key == "equallength") {
                // informational
            } else {
                throw ParseError("malformed header: unknown directive '@" + std::string(key) + "'", line_no, 1);
            }
            if (nl == text.size()) break;
            continue;
        }
        std::size_t lead = std::size_t(line.data() - raw.data());
        std::size_t c1 = line.find(':');
        if (c1 == std::string_view::npos || c1 == 0)
            throw ParseError("expected 'name:timestamp:values'", line_no, int(lead) + 1);
        std::size_t c2 = line.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw ParseError("missing values section", line_no, int(lead + c1) + 2);
        Series s;
        s.name = std::string(line.substr(0, c1));
        s.start = detail::parse_timestamp(line.substr(c1 + 1, c2 - c1 - 1), line_no, int(lead + c1) + 2);
        std::string_view vals = line.substr(c2 + 1);
        std::size_t off = 0;
        while (!vals.empty() && off <= vals.size()) {
            std::size_t comma = vals.find(',', off);
            if (comma == std::string_view::npos) comma = vals.size();
            std::string_view tok = vals.substr(off, comma - off);
            int column = int(lead + c2 + 1 + off) + 1;
            std::string_view t = detail::trim(tok);
            if (t == "?") {
                s.values.push_back(kMissing);
            } else {
                double v = 0.0;
                auto r = std::from_chars(t.data(), t.data() + t.size(), v);
                if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size() || !std::isfinite(v))
                    throw ParseError("expected a number or '?', got '" + std::string(tok) + "'", line_no, column);
                s.values.push_back(v);
            }
            off = comma + 1;
            if (comma == vals.size()) break;
        }
        out.series.push_back(std::move(s));
        if (nl == text.size()) break;
    }
    if (!in_data) throw ParseError("malformed header: missing @data", 0, 0);
    return out;
}

inline std::string format_value(double v) {
    if (is_missing(v)) return "?";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string write_tsf(SeriesSet const& set) {
    std::ostringstream out;
    out << "@relation " << (set.relation.empty() ? "predopt" : set.relation) << "\n";
    out << "@attribute series_name string\n";
    out << "@attribute start_timestamp date\n";
    out << "@frequency 15_minutes\n";
    if (set.horizon) out << "@horizon " << *set.horizon << "\n";
    out << "@missing true\n";
    out << "@equallength false\n";
    out << "@data\n";
    for (auto const& s : set.series) {
        out << s.name << ':' << format_timestamp(s.start) << ':';
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (i) out << ',';
            out << format_value(s.values[i]);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace predopt
