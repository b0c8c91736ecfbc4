#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wkstat {

inline constexpr double kDefaultStepSeconds = 60.0;

/// Sample autocorrelation C(s), s = 0 .. values.size() - 1.
struct Acf {
    std::vector<double> values;
    /// Variance that rescales C back to an autocovariance.
    double sigma2 = 0.0;
    double mu = 0.0;
    /// Number of ensemble members averaged (1 for a direct estimate).
    std::size_t segments = 1;

    std::size_t max_lag() const { return values.empty() ? 0 : values.size() - 1; }
};

/// Full-length DFT under the unitary 1/sqrt(N) convention.
struct ComplexSpectrum {
    std::vector<double> frequencies;  // Hz, f_k = k / (N * step)
    std::vector<std::complex<double>> values;
};

enum class SpectrumKind { Psd, FtAcf };

std::string_view to_string(SpectrumKind kind);
SpectrumKind parse_spectrum_kind(std::string_view name);

/// One-sided real spectrum over k = 0 .. floor(n/2).
struct Spectrum {
    std::vector<double> frequencies;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::Psd;
    bool smoothed = false;

    std::size_t size() const { return values.size(); }
    /// Grid spacing; the grid is uniform by construction.
    double resolution() const;
};

struct EnsemblePlan {
    std::size_t segment_len = 10'000;
    bool drop_remainder = true;
};

/// f_k = k / (n * step) for k = 0 .. floor(n/2).
std::vector<double> one_sided_grid(std::size_t n, double step_seconds);

/// Throws DataError unless both spectra share the same frequency grid.
void require_same_grid(const Spectrum& a, const Spectrum& b);

/// Biased estimator: C(s) = (1/N) sum_{t<N-s} (x_t - mu)(x_{t+s} - mu) / sigma^2
/// with mu and sigma^2 the full-sample mean and population variance.
Acf autocorrelation(std::span<const double> x, std::size_t max_lag);

ComplexSpectrum dft(std::span<const double> x, double step_seconds = kDefaultStepSeconds);

/// |dft(x)|^2 folded to one side: bins 1 .. ceil(n/2) - 1 carry the power of
/// both +k and -k.
Spectrum psd(std::span<const double> x, double step_seconds = kDefaultStepSeconds);

/// Rescaled transform of the autocorrelation on the n-point grid:
///   sigma2 * (1 + 2 Re sum_{s=1}^{max_lag} C(s) exp(-2 pi i k s / n)),
/// folded to one side exactly like psd() so the two are comparable bin by bin.
Spectrum ft_autocorr(const Acf& acf, double sigma2, std::size_t n,
                     double step_seconds = kDefaultStepSeconds);

/// Cuts x into floor(N / l_s) consecutive segments, computes each member's
/// autocorrelation (own mean and variance) and averages them. sigma2 is the
/// square of the ensemble-averaged member deviation, each member's deviation
/// being measured about the ensemble mean. max_lag defaults to l_s - 1.
/// With drop_remainder unset, a trailing short segment (>= 2 samples)
/// contributes to the lags it covers.
Acf ensemble_acf(std::span<const double> x, const EnsemblePlan& plan,
                 std::optional<std::size_t> max_lag = std::nullopt);

/// Arithmetic mean of the members' one-sided periodograms. A trailing short
/// segment never enters the average (its grid differs).
Spectrum ensemble_psd(std::span<const double> x, const EnsemblePlan& plan,
                      double step_seconds = kDefaultStepSeconds);

/// CSV with header "frequency_hz,value,kind,smoothed"; several spectra may
/// share one file, distinguished by the kind column.
void write_spectra_csv(std::ostream& out, std::span<const Spectrum> spectra);
std::vector<Spectrum> read_spectra_csv(std::istream& in);

}  // namespace wkstat
