#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wkstat/ingest.hpp"

namespace wkstat {

enum class GeneratorKind { GaussianIid, Ar1, RandomWalk, Fbm, QGaussian, VarianceSwitch };

GeneratorKind parse_generator_kind(std::string_view name);
std::string_view to_string(GeneratorKind kind);

/// Longest fBm path produced by exact synthesis.
inline constexpr std::size_t kMaxFbmLength = std::size_t{1} << 18;

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::GaussianIid;
    std::size_t n = 1024;
    std::uint64_t seed = 0;
    double sigma = 1.0;       // noise scale (sigma_1 for variance_switch)
    double phi = 0.6;         // ar1 coefficient, |phi| < 1
    double hurst = 0.5;       // fbm, in (0, 1)
    double q = 1.5;           // qgaussian, in (1, 3)
    double sigma_after = 3.0; // variance_switch, sigma_2
    std::optional<std::size_t> switch_at;  // variance_switch, default n / 2
    double base_level = 1000.0;
    std::int64_t step_seconds = 60;
    Instant start{1577836800};  // 2020-01-01T00:00:00Z

    /// Throws UsageError naming the offending parameter.
    void validate() const;
};

/// The raw process, before the level offset.
std::vector<double> synth_values(const GeneratorSpec& spec);

/// The process shifted by a constant so every value is a positive price:
/// base_level is added, raised if needed so the minimum is at least 1.
TickSeries generate(const GeneratorSpec& spec);

/// Standard q-Gaussian draws by the generalised Box-Muller method, times scale.
std::vector<double> qgaussian_sample(double q, double scale, std::uint64_t seed, std::size_t n);

/// Fractional Gaussian noise with unit variance: exact covariance by
/// circulant embedding, Cholesky factorisation as fallback for small n.
std::vector<double> fractional_gaussian_noise(double hurst, std::size_t n, std::uint64_t seed);

struct TailSummary {
    /// The q-Gaussian has no finite fourth moment (q >= 7/5).
    bool heavy_tail = false;
    /// Sample excess kurtosis, only when the population value exists.
    std::optional<double> excess_kurtosis;
};

TailSummary summarize_tails(std::span<const double> sample, double q);

}  // namespace wkstat
