#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wkstat/spectral.hpp"

namespace wkstat {

inline constexpr double kDefaultSmoothHz = 3.97e-5;
inline constexpr int kDefaultSmoothOrder = 1;

/// Central-point Savitzky-Golay weights: the value at offset 0 of the
/// least-squares polynomial of degree `order` through 2m+1 equally spaced
/// samples is sum_i weights[i] * y[i - m].
struct SgKernel {
    std::size_t half_width = 0;
    int order = 0;
    std::vector<double> weights;
};

SgKernel savgol_coeffs(std::size_t window_len, int order);

struct BinWindow {
    std::size_t bins = 3;
    /// The request was narrower than three bins and was widened to the minimum.
    bool raised = false;
    /// The request was wider than the spectrum and was cut to fit.
    bool clipped = false;
};

/// round(window_hz / df), bumped up to odd, clipped to [3, largest odd <= size].
BinWindow hz_to_bins(double window_hz, const Spectrum& spectrum);

/// Savitzky-Golay filter over a uniformly sampled curve. Interior points use
/// the fixed kernel; the first and last m points are refit by least squares
/// over the truncated window that fits inside the data.
std::vector<double> savgol_filter(std::span<const double> values, std::size_t window_len, int order);

/// Smooths a spectrum with a window given in Hz. The grid and kind are kept.
Spectrum smooth_spectrum(const Spectrum& spec, double window_hz, int order);

}  // namespace wkstat
