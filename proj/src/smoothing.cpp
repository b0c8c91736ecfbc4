#include "wkstat/smoothing.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "wkstat/error.hpp"
#include "wkstat/fft.hpp"

namespace wkstat {
namespace {

// Kernels wider than this are applied by FFT convolution.
constexpr std::size_t kDirectConvolutionLimit = 513;

std::vector<double> convolve_interior(std::span<const double> y, const std::vector<double>& w) {
    const std::size_t n = y.size();
    const std::size_t m = w.size() / 2;
    std::vector<double> out(n, 0.0);
    if (w.size() <= kDirectConvolutionLimit) {
        for (std::size_t i = m; i + m < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * y[i - m + j];
            out[i] = acc;
        }
        return out;
    }
    // Symmetric kernel: correlation equals convolution.
    std::size_t len = 1;
    while (len < n + w.size()) len <<= 1;
    RealFft fft(len);
    std::vector<std::complex<double>> ys(fft.bins()), ws(fft.bins());
    fft.forward(y, ys);
    fft.forward(w, ws);
    for (std::size_t k = 0; k < ys.size(); ++k) ys[k] *= ws[k];
    std::vector<double> full(len);
    fft.inverse(ys, full);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t i = m; i + m < n; ++i) out[i] = full[i + m] * scale;
    return out;
}

// Least-squares refit for the first m outputs: sample i is estimated from the
// polynomial fitted over [0, i + m]. Moments are accumulated as the window
// grows, in the scaled coordinate u = t / m. Calling it on the reversed data
// covers the right edge.
void refit_leading_edge(std::span<const double> y, std::size_t m, int order, std::vector<double>& out,
                        bool reversed) {
    const std::size_t n = y.size();
    const auto at = [&](std::size_t t) { return reversed ? y[n - 1 - t] : y[t]; };
    const int p_max = order;
    const double scale = static_cast<double>(std::max<std::size_t>(m, 1));

    Eigen::VectorXd moments = Eigen::VectorXd::Zero(2 * p_max + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p_max + 1);
    std::size_t end = 0;  // samples [0, end) accumulated
    for (std::size_t i = 0; i < m && i < n; ++i) {
        const std::size_t want = std::min(n, i + m + 1);
        for (; end < want; ++end) {
            const double u = static_cast<double>(end) / scale;
            double pw = 1.0;
            for (int a = 0; a <= 2 * p_max; ++a) {
                moments[a] += pw;
                if (a <= p_max) rhs[a] += pw * at(end);
                pw *= u;
            }
        }
        const int p = std::min<int>(p_max, static_cast<int>(end) - 1);
        Eigen::MatrixXd gram(p + 1, p + 1);
        for (int a = 0; a <= p; ++a)
            for (int b = 0; b <= p; ++b) gram(a, b) = moments[a + b];
        const Eigen::VectorXd coef = gram.ldlt().solve(rhs.head(p + 1));
        const double u = static_cast<double>(i) / scale;
        double value = 0.0;
        for (int a = p; a >= 0; --a) value = value * u + coef[a];
        out[reversed ? n - 1 - i : i] = value;
    }
}

}  // namespace

SgKernel savgol_coeffs(std::size_t window_len, int order) {
    if (window_len < 3 || window_len % 2 == 0) {
        throw UsageError("Savitzky-Golay window must be odd and at least 3, got " +
                         std::to_string(window_len));
    }
    if (order < 0 || static_cast<std::size_t>(order) >= window_len) {
        throw UsageError("Savitzky-Golay order " + std::to_string(order) +
                         " must lie in [0, window)");
    }
    const std::size_t m = window_len / 2;
    const auto rows = static_cast<Eigen::Index>(window_len);
    Eigen::MatrixXd design(rows, order + 1);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double u = (static_cast<double>(r) - static_cast<double>(m)) / static_cast<double>(m);
        double pw = 1.0;
        for (int c = 0; c <= order; ++c) {
            design(r, c) = pw;
            pw *= u;
        }
    }
    // The fitted value at u = 0 is the constant coefficient, e0' (A'A)^-1 A' y.
    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd z = gram.ldlt().solve(Eigen::VectorXd::Unit(order + 1, 0));
    const Eigen::VectorXd w = design * z;
    SgKernel k;
    k.half_width = m;
    k.order = order;
    k.weights.assign(w.data(), w.data() + w.size());
    // Average mirrored pairs so rounding cannot break the symmetry.
    for (std::size_t i = 0; i < m; ++i) {
        const double avg = 0.5 * (k.weights[i] + k.weights[window_len - 1 - i]);
        k.weights[i] = k.weights[window_len - 1 - i] = avg;
    }
    return k;
}

BinWindow hz_to_bins(double window_hz, const Spectrum& spectrum) {
    if (spectrum.size() < 3) throw UsageError("smoothing needs a spectrum with at least 3 bins");
    const double df = spectrum.resolution();
    if (!(df > 0.0)) throw DataError("spectrum grid is not increasing");
    for (std::size_t k = 1; k < spectrum.frequencies.size(); ++k) {
        const double step = spectrum.frequencies[k] - spectrum.frequencies[k - 1];
        if (std::abs(step - df) > 1e-9 * df) throw DataError("spectrum grid is not uniform");
    }
    if (!(window_hz > 0.0)) throw UsageError("smoothing window must be positive");

    auto bins = static_cast<std::size_t>(std::llround(window_hz / df));
    if (bins % 2 == 0) ++bins;
    const std::size_t largest = spectrum.size() % 2 == 1 ? spectrum.size() : spectrum.size() - 1;
    BinWindow out;
    out.bins = bins;
    if (bins < 3) {
        out.bins = 3;
        out.raised = true;
    } else if (bins > largest) {
        out.bins = largest;
        out.clipped = true;
    }
    return out;
}

std::vector<double> savgol_filter(std::span<const double> values, std::size_t window_len, int order) {
    const SgKernel kernel = savgol_coeffs(window_len, order);
    if (values.size() < window_len) {
        throw UsageError("Savitzky-Golay window " + std::to_string(window_len) +
                         " is longer than the data (" + std::to_string(values.size()) + ")");
    }
    auto out = convolve_interior(values, kernel.weights);
    refit_leading_edge(values, kernel.half_width, order, out, false);
    refit_leading_edge(values, kernel.half_width, order, out, true);
    return out;
}

Spectrum smooth_spectrum(const Spectrum& spec, double window_hz, int order) {
    if (spec.smoothed) throw UsageError("spectrum is already smoothed");
    const BinWindow win = hz_to_bins(window_hz, spec);
    Spectrum out;
    out.frequencies = spec.frequencies;
    out.kind = spec.kind;
    out.smoothed = true;
    out.values = savgol_filter(spec.values, win.bins, std::min<int>(order, static_cast<int>(win.bins) - 1));
    return out;
}

}  // namespace wkstat
