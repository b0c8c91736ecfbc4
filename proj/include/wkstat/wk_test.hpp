#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wkstat/ingest.hpp"
#include "wkstat/series.hpp"
#include "wkstat/spectral.hpp"
#include "wkstat/window.hpp"

namespace wkstat {

enum class Metric { MedianLogRatio, MeanPctDiff };
std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

/// Which return feeds the normalisation stage.
///   Lag1:     x(t) = I*(t) - I*(t-1)
///   Anchored: x(t) = I*(t) - I*(1), the level relative to the first sample
enum class ReturnMode { Lag1, Anchored };
std::string_view to_string(ReturnMode r);
ReturnMode parse_return_mode(std::string_view name);

/// segment: detrend over one week; full: over one year.
enum class Profile { Segment, Full };
Profile parse_profile(std::string_view name);
std::string_view to_string(Profile p);

struct Band {
    double lo_hz = 0.0;
    double hi_hz = 0.0;
};

/// Calibrated against the synthetic oracles at N = 2^17: iid Gaussian input
/// lands near 3e-5, the variance-switch series normalised over half its
/// length above 1e-2 (see tests/unit/calibration_test.cpp).
inline constexpr double kDefaultThreshold = 0.005;
inline constexpr std::size_t kDefaultEnsembleLen = 10'000;
/// Lowest bins left out of the default band.
inline constexpr std::size_t kBandSkipLow = 5;
/// Fraction of the top of the grid left out of the default band.
inline constexpr double kBandSkipHighFraction = 0.10;
inline constexpr std::size_t kMinBandBins = 8;

struct TestConfig {
    WindowLen delta1;
    WindowLen delta2;
    std::size_t ensemble_len = kDefaultEnsembleLen;
    double smooth_hz = 3.97e-5;
    int smooth_order = 1;
    /// Empty selects the default band on the ensemble grid.
    std::optional<Band> band;
    Metric metric = Metric::MedianLogRatio;
    double threshold = kDefaultThreshold;
    ReturnMode returns = ReturnMode::Lag1;

    /// Throws UsageError naming the first offending field.
    void validate() const;
};

/// Defaults for a 60 s series: delta2 = 60 min, delta1 = 1 week (segment) or
/// 1 year (full) in the given calendar.
TestConfig default_config(Profile profile = Profile::Segment,
                          Calendar calendar = Calendar::Continuous,
                          std::int64_t step_seconds = 60);

struct WkComparison {
    Spectrum psd_smoothed;
    Spectrum ftac_smoothed;
    /// Per-bin discrepancy under the configured metric; NaN where unusable.
    std::vector<double> pointwise;
    double distance = 0.0;
};

struct Diagnostics {
    std::size_t sigma_floor_hits = 0;
    std::size_t segments = 0;
    std::size_t smoothing_bins = 0;
    bool smoothing_raised = false;
    std::size_t band_bins = 0;
    Band band;
};

struct Verdict {
    std::string label;
    bool stationary = false;
    double distance = 0.0;
    double threshold = 0.0;
    TestConfig config;
    /// Length of the tested price series (of the return series when built by
    /// evaluate_returns directly).
    std::size_t n_samples = 0;
    Diagnostics diagnostics;
    WkComparison comparison;
};

struct PercentDiff {
    std::vector<double> values;  // NaN at excluded bins
    std::vector<std::size_t> excluded;
};

/// |a_i - b_i| / |a_i| per bin; bins with a_i == 0 are excluded.
PercentDiff percentage_difference(const Spectrum& a, const Spectrum& b);

/// The default band: skip the lowest five bins and the top tenth of the grid.
Band default_band(const Spectrum& grid);

/// Per-bin discrepancy of a smoothed pair on the full grid.
std::vector<double> pointwise_discrepancy(const Spectrum& psd, const Spectrum& ftac, Metric metric);

/// median_log_ratio: median over the band of |log10(psd/ftac)| where both
/// are positive. mean_pct_diff: mean of |ftac - psd| / |ftac| over the band.
/// Fewer than 8 usable bins is a DataError.
double wk_distance(const Spectrum& psd, const Spectrum& ftac, const Band& band, Metric metric);

/// Detrend (moving average over delta1) and form returns. Shared by every
/// normalisation window of a scan.
DetrendedSeries prepare_returns(const TickSeries& series, const TestConfig& cfg);

/// Normalisation onwards: rolling deviation over delta2, standard score,
/// ensemble PSD and ACF, rescaled ACF transform, smoothing and distance.
Verdict evaluate_returns(const DetrendedSeries& returns, const TestConfig& cfg,
                         double step_seconds, const std::string& label);

Verdict test_stationarity(const TickSeries& series, const TestConfig& cfg);

/// One verdict per delta2, in input order, everything else held fixed.
std::vector<Verdict> scan_windows(const TickSeries& series, const TestConfig& base,
                                  std::span<const WindowLen> delta2_list);

/// The largest stationary candidate. Candidates must be in descending order.
std::optional<WindowLen> max_stationary_window(const TickSeries& series, const TestConfig& base,
                                               std::span<const WindowLen> candidates);

/// {"label","delta1","delta2","delta1_requested","delta2_requested","metric",
///  "distance","threshold","stationary","n_samples","band"} on one line, window
/// lengths in samples; "spectra_file" is added when given.
std::string verdict_json_line(const Verdict& v, std::string_view spectra_file = {});

}  // namespace wkstat
