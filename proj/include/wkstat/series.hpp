#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wkstat/ingest.hpp"

namespace wkstat {

/// Price differences. anchor is the 1-based base index t0 of an anchored
/// return I(t0 + t) - I(t0); it is empty for lag-1 returns I(t) - I(t-1).
struct ReturnSeries {
    std::vector<double> values;
    std::string parent_label;
    std::optional<std::size_t> anchor;
};

struct TrendSeries {
    std::vector<double> values;
    std::size_t window = 0;
};

/// A series with its trend removed: either the detrended index I* or the
/// detrended return x* derived from it.
struct DetrendedSeries {
    std::vector<double> values;
    std::size_t window_used = 0;
};

struct SigmaSeries {
    std::vector<double> values;
    std::size_t window_used = 0;
};

struct NormalizedSeries {
    std::vector<double> values;
    std::size_t delta1 = 0;
    std::size_t delta2 = 0;
    double sigma_floor = 0.0;
    /// Indices where the windowed deviation fell below sigma_floor.
    std::vector<std::size_t> floored;
};

/// Anchored return: values[t-1] = I(t0 + t) - I(t0) for t = 1 .. N - t0.
/// t0 is 1-based, 1 <= t0 < N.
ReturnSeries price_return(std::span<const double> index, std::size_t t0);
ReturnSeries price_return(const TickSeries& series, std::size_t t0);

/// Lag-1 return: values[t-1] = I(t) - I(t-1), length N - 1.
ReturnSeries lag1_returns(std::span<const double> index);
ReturnSeries lag1_returns(const TickSeries& series);

/// Inclusive 0-based bounds of the averaging window centred on sample i:
/// [i - floor((w-1)/2), i + ceil((w-1)/2)] clipped to [0, n-1]. The interior
/// window holds exactly w samples; edge windows are truncated.
struct WindowBounds {
    std::size_t lo;
    std::size_t hi;
};
WindowBounds window_bounds(std::size_t i, std::size_t n, std::size_t w);

/// Three-regime moving average. Each output is the arithmetic mean of the
/// samples inside its (possibly truncated) window.
TrendSeries moving_average(std::span<const double> x, std::size_t w);

DetrendedSeries detrend(std::span<const double> series, const TrendSeries& trend);

/// Lag-1 differences of a detrended index, keeping its window.
DetrendedSeries detrended_returns(const DetrendedSeries& index);

/// Population standard deviation over the same windows as moving_average.
SigmaSeries rolling_std(std::span<const double> x, std::size_t w);

/// x / max(sigma, sigma_floor) with sigma_floor = 1e-12 * std(x).
NormalizedSeries standard_score(const DetrendedSeries& x, const SigmaSeries& sigma);

/// Relative floor applied to the global deviation in standard_score.
inline constexpr double kSigmaFloorRatio = 1e-12;

double mean(std::span<const double> x);
/// Population variance (divide by count).
double variance(std::span<const double> x);

}  // namespace wkstat
