#include "wkstat/synth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "wkstat/error.hpp"
#include "wkstat/fft.hpp"
#include "wkstat/random.hpp"

namespace wkstat {
namespace {

constexpr std::size_t kCholeskyLimit = 2048;

double fgn_autocovariance(double hurst, double lag) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(lag + 1.0), h2) - 2.0 * std::pow(std::abs(lag), h2) +
                  std::pow(std::abs(lag - 1.0), h2));
}

std::vector<double> fgn_cholesky(double hurst, std::size_t n, CounterRng& rng) {
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            cov(i, j) = fgn_autocovariance(hurst, static_cast<double>(i - j));
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DataError("fBm covariance is not positive definite");
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = rng.normal();
    const Eigen::VectorXd x = llt.matrixL() * z;
    return std::vector<double>(x.data(), x.data() + x.size());
}

// ln_q(x) = (x^(1-q) - 1) / (1 - q)
double q_log(double x, double q) {
    if (std::abs(q - 1.0) < 1e-12) return std::log(x);
    return (std::pow(x, 1.0 - q) - 1.0) / (1.0 - q);
}

}  // namespace

GeneratorKind parse_generator_kind(std::string_view name) {
    if (name == "gaussian_iid") return GeneratorKind::GaussianIid;
    if (name == "ar1") return GeneratorKind::Ar1;
    if (name == "random_walk") return GeneratorKind::RandomWalk;
    if (name == "fbm") return GeneratorKind::Fbm;
    if (name == "qgaussian") return GeneratorKind::QGaussian;
    if (name == "variance_switch") return GeneratorKind::VarianceSwitch;
    throw UsageError("unknown generator '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::GaussianIid: return "gaussian_iid";
        case GeneratorKind::Ar1: return "ar1";
        case GeneratorKind::RandomWalk: return "random_walk";
        case GeneratorKind::Fbm: return "fbm";
        case GeneratorKind::QGaussian: return "qgaussian";
        case GeneratorKind::VarianceSwitch: return "variance_switch";
    }
    return "unknown";
}

void GeneratorSpec::validate() const {
    if (n < 2) throw UsageError("n must be at least 2");
    if (!(sigma > 0.0)) throw UsageError("sigma must be positive");
    if (step_seconds <= 0) throw UsageError("step must be positive");
    switch (kind) {
        case GeneratorKind::Ar1:
            if (!(std::abs(phi) < 1.0)) throw UsageError("phi must satisfy |phi| < 1");
            break;
        case GeneratorKind::Fbm:
            if (!(hurst > 0.0 && hurst < 1.0)) throw UsageError("hurst must lie in (0, 1)");
            if (n > kMaxFbmLength) {
                throw UsageError("fbm length " + std::to_string(n) + " exceeds the exact-synthesis limit " +
                                 std::to_string(kMaxFbmLength));
            }
            break;
        case GeneratorKind::QGaussian:
            if (!(q > 1.0 && q < 3.0)) throw UsageError("q must lie in (1, 3)");
            break;
        case GeneratorKind::VarianceSwitch:
            if (!(sigma_after > 0.0)) throw UsageError("sigma_after must be positive");
            if (switch_at && *switch_at > n) throw UsageError("switch_at must not exceed n");
            break;
        default:
            break;
    }
}

std::vector<double> fractional_gaussian_noise(double hurst, std::size_t n, std::uint64_t seed) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw UsageError("hurst must lie in (0, 1)");
    if (n < 1 || n > kMaxFbmLength) throw UsageError("fGn length outside [1, 2^18]");
    CounterRng rng(seed, 0);

    // Circulant embedding of size 2n: first row gamma(0..n), then mirrored.
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> row(m), eig(m);
    for (std::size_t j = 0; j <= n; ++j) row[j] = fgn_autocovariance(hurst, static_cast<double>(j));
    for (std::size_t j = n + 1; j < m; ++j) row[j] = row[m - j];
    ComplexFft fft(m, ComplexFft::Direction::Forward);
    fft.execute(row, eig);

    const double tol = 1e-10 * std::abs(eig[0].real());
    bool embeddable = true;
    for (const auto& e : eig) {
        if (e.real() < -tol) {
            embeddable = false;
            break;
        }
    }
    if (!embeddable) {
        if (n > kCholeskyLimit) throw DataError("circulant embedding failed for this fBm length");
        return fgn_cholesky(hurst, n, rng);
    }

    std::vector<std::complex<double>> w(m), y(m);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double lambda = std::max(eig[k].real(), 0.0);
        const double a = rng.normal();
        const double b = rng.normal();
        w[k] = std::sqrt(lambda * inv_m) * std::complex<double>(a, b);
    }
    fft.execute(w, y);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = y[j].real();
    return out;
}

std::vector<double> qgaussian_sample(double q, double scale, std::uint64_t seed, std::size_t n) {
    if (!(q > 1.0 && q < 3.0)) throw UsageError("q must lie in (1, 3)");
    CounterRng rng(seed, 1);
    const double q_prime = (1.0 + q) / (3.0 - q);
    std::vector<double> out(n);
    for (auto& v : out) {
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        v = scale * std::sqrt(-2.0 * q_log(u1, q_prime)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    return out;
}

TailSummary summarize_tails(std::span<const double> sample, double q) {
    TailSummary out;
    out.heavy_tail = q >= 7.0 / 5.0;
    if (out.heavy_tail || sample.size() < 4) return out;
    long double m = 0.0L;
    for (double v : sample) m += v;
    m /= static_cast<long double>(sample.size());
    long double m2 = 0.0L, m4 = 0.0L;
    for (double v : sample) {
        const long double d = v - m;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<long double>(sample.size());
    m4 /= static_cast<long double>(sample.size());
    out.excess_kurtosis = static_cast<double>(m4 / (m2 * m2) - 3.0L);
    return out;
}

std::vector<double> synth_values(const GeneratorSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n;
    CounterRng rng(spec.seed, 0);
    std::vector<double> x(n);
    switch (spec.kind) {
        case GeneratorKind::GaussianIid:
            for (auto& v : x) v = spec.sigma * rng.normal();
            break;
        case GeneratorKind::Ar1: {
            x[0] = spec.sigma / std::sqrt(1.0 - spec.phi * spec.phi) * rng.normal();
            for (std::size_t t = 1; t < n; ++t) x[t] = spec.phi * x[t - 1] + spec.sigma * rng.normal();
            break;
        }
        case GeneratorKind::RandomWalk: {
            double level = 0.0;
            for (auto& v : x) {
                level += spec.sigma * rng.normal();
                v = level;
            }
            break;
        }
        case GeneratorKind::Fbm: {
            const auto noise = fractional_gaussian_noise(spec.hurst, n, spec.seed);
            double level = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                level += spec.sigma * noise[t];
                x[t] = level;
            }
            break;
        }
        case GeneratorKind::QGaussian:
            x = qgaussian_sample(spec.q, spec.sigma, spec.seed, n);
            break;
        case GeneratorKind::VarianceSwitch: {
            const std::size_t at = spec.switch_at.value_or(n / 2);
            for (std::size_t t = 0; t < n; ++t) x[t] = (t < at ? spec.sigma : spec.sigma_after) * rng.normal();
            break;
        }
    }
    return x;
}

TickSeries generate(const GeneratorSpec& spec) {
    TickSeries s;
    s.values = synth_values(spec);
    const double lowest = *std::min_element(s.values.begin(), s.values.end());
    const double offset = std::max(spec.base_level, 1.0 - lowest);
    for (auto& v : s.values) v += offset;
    s.start = spec.start;
    s.step_seconds = spec.step_seconds;
    s.label = std::string(to_string(spec.kind)) + "-seed" + std::to_string(spec.seed);
    return s;
}

}  // namespace wkstat
