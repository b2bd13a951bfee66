#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace predopt {

using Date = std::chrono::year_month_day;

inline Date make_date(int y, unsigned m, unsigned d) {
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) throw std::invalid_argument("invalid calendar date");
    return date;
}

// Accepts YYYY-MM-DD.
inline Date parse_date(std::string const& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3)
        throw std::invalid_argument("expected date as YYYY-MM-DD, got '" + text + "'");
    return make_date(y, m, d);
}

inline std::string format_date(Date const& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(date.year()), unsigned(date.month()),
                  unsigned(date.day()));
    return buf;
}

/// Calendar layout of the scheduling horizon.
///
/// Slots are 15 minutes long. The standard grid has 96 slots per day and an
/// office window of [9:00, 17:00) = slots [36, 68). Micro grids used for
/// exhaustive verification shrink the day but keep the weekly structure:
/// a week is always 7 days and recurring starts are expressed relative to
/// 00:00 of the first Monday.
class TimeGrid {
public:
    static constexpr int kStandardStepsPerDay = 96;
    static constexpr int kStandardOfficeStart = 36;
    static constexpr int kStandardOfficeEnd = 68;
    static constexpr double kHoursPerSlot = 0.25;

    TimeGrid(Date start, int num_days, int steps_per_day = kStandardStepsPerDay,
             int office_start = kStandardOfficeStart, int office_end = kStandardOfficeEnd)
        : start_(start),
          num_days_(num_days),
          steps_per_day_(steps_per_day),
          office_start_(office_start),
          office_end_(office_end) {
        if (!start.ok()) throw std::invalid_argument("invalid start date");
        if (num_days < 1) throw std::invalid_argument("grid needs at least one day");
        if (steps_per_day < 1) throw std::invalid_argument("steps_per_day must be positive");
        if (office_start < 0 || office_end > steps_per_day || office_start >= office_end)
            throw std::invalid_argument("office window must be a nonempty subrange of the day");

        std::chrono::sys_days first{start};
        unsigned iso = std::chrono::weekday{first}.iso_encoding();  // Mon=1..Sun=7
        weekday_.reserve(num_days);
        for (int d = 0; d < num_days; ++d) weekday_.push_back(int((iso - 1 + unsigned(d)) % 7));
        int first_monday_day = int((8 - iso) % 7);
        first_monday_offset_ = first_monday_day * steps_per_day;
    }

    Date start_date() const { return start_; }
    int num_days() const { return num_days_; }
    int steps_per_day() const { return steps_per_day_; }
    int total_slots() const { return num_days_ * steps_per_day_; }
    int week_slots() const { return 7 * steps_per_day_; }
    int first_monday_offset() const { return first_monday_offset_; }
    int office_start() const { return office_start_; }
    int office_end() const { return office_end_; }
    int office_slots_per_day() const { return office_end_ - office_start_; }

    int day_of(int t) const { return t / steps_per_day_; }
    int slot_of_day(int t) const { return t % steps_per_day_; }

    /// 0 = Monday ... 6 = Sunday.
    int weekday_of_day(int day) const { return weekday_.at(day); }
    bool is_weekday(int day) const { return weekday_of_day(day) < 5; }

    bool contains(int t) const { return t >= 0 && t < total_slots(); }

    bool is_office_slot(int t) const {
        int sod = slot_of_day(t);
        return is_weekday(day_of(t)) && sod >= office_start_ && sod < office_end_;
    }

    /// Position of absolute slot t within the first-Monday week, or nullopt
    /// for the slots before the first Monday (no recurring load there).
    std::optional<int> map_to_first_week(int t) const {
        if (!contains(t)) throw std::out_of_range("slot " + std::to_string(t) + " outside grid");
        if (t < first_monday_offset_) return std::nullopt;
        return (t - first_monday_offset_) % week_slots();
    }

    friend bool operator==(TimeGrid const& a, TimeGrid const& b) {
        return a.start_ == b.start_ && a.num_days_ == b.num_days_ &&
               a.steps_per_day_ == b.steps_per_day_ && a.office_start_ == b.office_start_ &&
               a.office_end_ == b.office_end_;
    }

private:
    Date start_;
    int num_days_;
    int steps_per_day_;
    int office_start_;
    int office_end_;
    int first_monday_offset_ = 0;
    std::vector<int> weekday_;
};

/// Standard 96-slot grid. A recurring week must fit, so at least 7 days.
inline TimeGrid build_time_grid(Date start, int num_days) {
    if (num_days < 7)
        throw std::invalid_argument("grid must span at least 7 days to host a recurring week");
    return TimeGrid(start, num_days);
}

}  // namespace predopt
