#include "wkstat/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wkstat/error.hpp"

namespace wkstat {
namespace {

void check_window(std::size_t w, std::size_t n, const char* what) {
    if (w < 1 || w > n) {
        throw UsageError(std::string(what) + ": window " + std::to_string(w) +
                         " outside [1, " + std::to_string(n) + "]");
    }
}

// Prefix sums of (x - ref) and (x - ref)^2 in extended precision, so window
// sums are exact differences of small partial sums.
struct Prefix {
    double ref = 0.0;
    std::vector<long double> s1;
    std::vector<long double> s2;

    Prefix(std::span<const double> x, bool squares) : ref(mean(x)) {
        s1.assign(x.size() + 1, 0.0L);
        if (squares) s2.assign(x.size() + 1, 0.0L);
        long double a = 0.0L, b = 0.0L;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const long double d = static_cast<long double>(x[i]) - ref;
            a += d;
            s1[i + 1] = a;
            if (squares) {
                b += d * d;
                s2[i + 1] = b;
            }
        }
    }
};

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    long double s = 0.0L;
    for (double v : x) s += v;
    return static_cast<double>(s / static_cast<long double>(x.size()));
}

double variance(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double m = mean(x);
    long double s = 0.0L;
    for (double v : x) {
        const long double d = static_cast<long double>(v) - m;
        s += d * d;
    }
    return static_cast<double>(s / static_cast<long double>(x.size()));
}

ReturnSeries price_return(std::span<const double> index, std::size_t t0) {
    if (t0 < 1 || t0 >= index.size()) {
        throw UsageError("base index t0 = " + std::to_string(t0) + " outside [1, " +
                         std::to_string(index.size() - 1) + "]");
    }
    ReturnSeries out;
    out.anchor = t0;
    const double base = index[t0 - 1];
    out.values.reserve(index.size() - t0);
    for (std::size_t i = t0; i < index.size(); ++i) out.values.push_back(index[i] - base);
    return out;
}

ReturnSeries price_return(const TickSeries& series, std::size_t t0) {
    auto out = price_return(std::span<const double>(series.values), t0);
    out.parent_label = series.label;
    return out;
}

ReturnSeries lag1_returns(std::span<const double> index) {
    if (index.size() < 2) throw DataError("lag-1 returns need at least 2 samples");
    ReturnSeries out;
    out.values.resize(index.size() - 1);
    for (std::size_t i = 1; i < index.size(); ++i) out.values[i - 1] = index[i] - index[i - 1];
    return out;
}

ReturnSeries lag1_returns(const TickSeries& series) {
    auto out = lag1_returns(std::span<const double>(series.values));
    out.parent_label = series.label;
    return out;
}

WindowBounds window_bounds(std::size_t i, std::size_t n, std::size_t w) {
    const std::size_t back = (w - 1) / 2;   // floor((w-1)/2)
    const std::size_t ahead = w / 2;        // ceil((w-1)/2)
    return WindowBounds{i >= back ? i - back : 0, std::min(n - 1, i + ahead)};
}

TrendSeries moving_average(std::span<const double> x, std::size_t w) {
    check_window(w, x.size(), "moving_average");
    const Prefix p(x, false);
    TrendSeries out;
    out.window = w;
    out.values.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto [lo, hi] = window_bounds(i, x.size(), w);
        const long double count = static_cast<long double>(hi - lo + 1);
        out.values[i] = static_cast<double>((p.s1[hi + 1] - p.s1[lo]) / count + p.ref);
    }
    return out;
}

DetrendedSeries detrend(std::span<const double> series, const TrendSeries& trend) {
    if (series.size() != trend.values.size()) {
        throw UsageError("detrend: series length " + std::to_string(series.size()) +
                         " != trend length " + std::to_string(trend.values.size()));
    }
    DetrendedSeries out;
    out.window_used = trend.window;
    out.values.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) out.values[i] = series[i] - trend.values[i];
    return out;
}

DetrendedSeries detrended_returns(const DetrendedSeries& index) {
    return DetrendedSeries{lag1_returns(index.values).values, index.window_used};
}

SigmaSeries rolling_std(std::span<const double> x, std::size_t w) {
    check_window(w, x.size(), "rolling_std");
    if (w < 2) throw UsageError("rolling_std: window must be at least 2 samples");
    const Prefix p(x, true);
    // First index of the run of equal values each sample belongs to. A window
    // inside one run is exactly flat; the prefix difference would leave
    // rounding residue there instead of zero.
    std::vector<std::size_t> run_start(x.size(), 0);
    for (std::size_t i = 1; i < x.size(); ++i) run_start[i] = x[i] == x[i - 1] ? run_start[i - 1] : i;
    SigmaSeries out;
    out.window_used = w;
    out.values.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto [lo, hi] = window_bounds(i, x.size(), w);
        if (run_start[hi] <= lo) {
            out.values[i] = 0.0;
            continue;
        }
        const long double count = static_cast<long double>(hi - lo + 1);
        const long double m = (p.s1[hi + 1] - p.s1[lo]) / count;
        const long double m2 = (p.s2[hi + 1] - p.s2[lo]) / count;
        const long double var = m2 - m * m;
        out.values[i] = var > 0.0L ? static_cast<double>(std::sqrt(var)) : 0.0;
    }
    return out;
}

NormalizedSeries standard_score(const DetrendedSeries& x, const SigmaSeries& sigma) {
    if (x.values.size() != sigma.values.size()) {
        throw UsageError("standard_score: series length " + std::to_string(x.values.size()) +
                         " != sigma length " + std::to_string(sigma.values.size()));
    }
    const double global_sd = std::sqrt(variance(x.values));
    if (!(global_sd > 0.0)) throw DataError("standard_score: input has zero variance");

    NormalizedSeries out;
    out.delta1 = x.window_used;
    out.delta2 = sigma.window_used;
    out.sigma_floor = kSigmaFloorRatio * global_sd;
    out.values.resize(x.values.size());
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        double s = sigma.values[i];
        if (s < out.sigma_floor) {
            out.floored.push_back(i);
            s = out.sigma_floor;
        }
        out.values[i] = x.values[i] / s;
    }
    return out;
}

}  // namespace wkstat
