#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/forecast/tsf.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace predopt {

inline constexpr int kWeekPeriod = 672;

/// Type-7 empirical quantile: linear interpolation between order statistics.
/// `sorted` must be ascending and nonempty.
inline double interpolated_quantile(std::span<double const> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    double h = (double(sorted.size()) - 1.0) * q;
    auto lo = std::size_t(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - double(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Even counts average the two middle values.
inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return interpolated_quantile(values, 0.5);
}

namespace detail {

// Non-missing history values at the same seasonal position as forecast step j,
// most recent first, at most `weeks` of them.
inline std::vector<double> seasonal_pool(std::span<double const> history, int j, int weeks, int period) {
    std::vector<double> pool;
    long n = long(history.size());
    long idx = n + j;
    for (long k = j / period + 1, taken = 0; taken < weeks; ++k, ++taken) {
        long src = idx - long(period) * k;
        if (src < 0) break;
        if (!is_missing(history[src])) pool.push_back(history[src]);
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline void check_forecast_args(std::span<double const> history, int horizon, int weeks, int period) {
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    if (weeks < 1) throw std::invalid_argument("weeks must be at least 1");
    if (period < 1) throw std::invalid_argument("period must be positive");
    if (long(history.size()) < period)
        throw DomainError("history shorter than one seasonal period (" + std::to_string(history.size()) + " < " +
                          std::to_string(period) + ")");
}

}  // namespace detail

/// Median of the `weeks` most recent values at the same weekly position.
/// Positions whose candidates are all missing fall back to the median of the
/// whole non-missing history.
inline std::vector<double> seasonal_median_forecast(std::span<double const> history, int horizon, int weeks = 8,
                                                    int period = kWeekPeriod) {
    detail::check_forecast_args(history, horizon, weeks, period);
    std::vector<double> all;
    for (double v : history)
        if (!is_missing(v)) all.push_back(v);
    if (all.empty()) throw DomainError("history is entirely missing");
    double fallback = median_of(all);

    std::vector<double> out(horizon);
    for (int j = 0; j < horizon; ++j) {
        auto pool = detail::seasonal_pool(history, j, weeks, period);
        out[j] = pool.empty() ? fallback : interpolated_quantile(pool, 0.5);
    }
    return out;
}

struct ScenarioSet {
    std::vector<double> levels;                // one per quantile series
    std::vector<std::vector<double>> series;   // parallel to levels
    std::vector<double> central;               // per-slot median
};

inline ScenarioSet quantile_scenarios(std::span<double const> history, int horizon,
                                      std::vector<double> const& quantiles = {0.10, 0.90}, int weeks = 8,
                                      int period = kWeekPeriod) {
    detail::check_forecast_args(history, horizon, weeks, period);
    if (quantiles.empty()) throw std::invalid_argument("no quantile levels requested");
    for (double q : quantiles)
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    ScenarioSet out;
    out.levels = quantiles;
    out.series.assign(quantiles.size(), std::vector<double>(horizon));
    out.central.resize(horizon);
    for (int j = 0; j < horizon; ++j) {
        auto pool = detail::seasonal_pool(history, j, weeks, period);
        if (pool.size() < 2)
            throw DomainError("insufficient history: forecast step " + std::to_string(j) + " has " +
                              std::to_string(pool.size()) + " non-missing seasonal values, need 2");
        for (std::size_t k = 0; k < quantiles.size(); ++k) out.series[k][j] = interpolated_quantile(pool, quantiles[k]);
        out.central[j] = interpolated_quantile(pool, 0.5);
    }
    return out;
}

/// Forecast of one step after the last non-missing value, repeated.
inline std::vector<double> naive_last_value_forecast(std::span<double const> history, int horizon) {
    for (auto it = history.rbegin(); it != history.rend(); ++it)
        if (!is_missing(*it)) return std::vector<double>(std::max(horizon, 0), *it);
    throw DomainError("history is entirely missing");
}

}  // namespace predopt
