#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/forecast/tsf.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace predopt {

enum class MissingPolicy { reject, skip };

struct ForecastEvalInput {
    std::span<double const> training;  // Y_1 .. Y_M
    std::span<double const> actual;    // Y_{M+1} .. Y_{M+h}
    std::span<double const> forecast;  // F_{M+1} .. F_{M+h}
    int season = 96;                   // S
};

/// Mean absolute scaled error. Under MissingPolicy::skip, pairs with a missing
/// side are dropped from both the numerator and the seasonal-naive scale, and
/// each sum is averaged over the pairs that remain.
inline double mase(ForecastEvalInput const& in, MissingPolicy policy = MissingPolicy::reject) {
    long M = long(in.training.size());
    long h = long(in.actual.size());
    int S = in.season;
    if (S < 1) throw std::invalid_argument("seasonal period must be positive");
    if (M <= S) throw std::invalid_argument("training length must exceed the seasonal period");
    if (h < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    if (long(in.forecast.size()) != h) throw std::invalid_argument("forecast and actual lengths differ");

    auto missing = [&](double v) {
        if (!is_missing(v)) return false;
        if (policy == MissingPolicy::reject) throw DomainError("missing value in MASE input");
        return true;
    };
    double num = 0.0;
    long num_n = 0;
    for (long k = 0; k < h; ++k) {
        if (missing(in.forecast[k]) | missing(in.actual[k])) continue;
        num += std::abs(in.forecast[k] - in.actual[k]);
        ++num_n;
    }
    double den = 0.0;
    long den_n = 0;
    for (long k = S; k < M; ++k) {
        if (missing(in.training[k]) | missing(in.training[k - S])) continue;
        den += std::abs(in.training[k] - in.training[k - S]);
        ++den_n;
    }
    if (num_n == 0) throw DomainError("no forecast pairs left after dropping missing values");
    if (den_n == 0 || den == 0.0)
        throw DomainError("MASE scale is zero: training series is constant at seasonal lag " + std::to_string(S));
    return (num / double(num_n)) / (den / double(den_n));
}

namespace detail {

inline void check_pair(std::span<double const> f, std::span<double const> y) {
    if (f.size() != y.size()) throw std::invalid_argument("forecast and actual lengths differ");
    if (f.empty()) throw std::invalid_argument("empty series");
}

}  // namespace detail

inline double mae(std::span<double const> f, std::span<double const> y) {
    detail::check_pair(f, y);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += std::abs(f[k] - y[k]);
    return s / double(f.size());
}

inline double rmse(std::span<double const> f, std::span<double const> y) {
    detail::check_pair(f, y);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += (f[k] - y[k]) * (f[k] - y[k]);
    return std::sqrt(s / double(f.size()));
}

}  // namespace predopt
