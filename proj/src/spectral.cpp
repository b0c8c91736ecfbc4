#include "wkstat/spectral.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "wkstat/error.hpp"
#include "wkstat/fft.hpp"
#include "wkstat/format.hpp"
#include "wkstat/series.hpp"

namespace wkstat {
namespace {

void fold_one_sided(std::vector<double>& values, std::size_t n) {
    const std::size_t last_doubled = (n + 1) / 2 - 1;
    for (std::size_t k = 1; k <= last_doubled && k < values.size(); ++k) values[k] *= 2.0;
}

// Biased autocovariance of the already-centred d for lags 0..max_lag. fft
// must have length >= 2 * d.size() so the circular sums do not wrap.
std::vector<double> autocovariance(RealFft& fft, std::span<const double> d, std::size_t max_lag) {
    const std::size_t n = d.size();
    std::vector<std::complex<double>> spec(fft.bins());
    fft.forward(d, spec);
    for (auto& z : spec) z = std::norm(z);
    std::vector<double> circ(fft.size());
    fft.inverse(spec, circ);
    const double scale = 1.0 / (static_cast<double>(fft.size()) * static_cast<double>(n));
    std::vector<double> out(max_lag + 1);
    for (std::size_t s = 0; s <= max_lag; ++s) out[s] = circ[s] * scale;
    return out;
}

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError("malformed number '" + std::string(text) + "' in spectra CSV");
    }
    return v;
}

}  // namespace

std::string_view to_string(SpectrumKind kind) { return kind == SpectrumKind::Psd ? "psd" : "ft_acf"; }

SpectrumKind parse_spectrum_kind(std::string_view name) {
    if (name == "psd") return SpectrumKind::Psd;
    if (name == "ft_acf") return SpectrumKind::FtAcf;
    throw DataError("unknown spectrum kind '" + std::string(name) + "'");
}

double Spectrum::resolution() const {
    return frequencies.size() < 2 ? 0.0 : frequencies[1] - frequencies[0];
}

std::vector<double> one_sided_grid(std::size_t n, double step_seconds) {
    std::vector<double> f(n / 2 + 1);
    const double denom = static_cast<double>(n) * step_seconds;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) / denom;
    return f;
}

void require_same_grid(const Spectrum& a, const Spectrum& b) {
    if (a.frequencies != b.frequencies) {
        throw DataError("spectra are on different frequency grids (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " bins)");
    }
}

Acf autocorrelation(std::span<const double> x, std::size_t max_lag) {
    if (max_lag >= x.size()) {
        throw UsageError("autocorrelation: max lag " + std::to_string(max_lag) +
                         " must be below the series length " + std::to_string(x.size()));
    }
    Acf acf;
    acf.mu = mean(x);
    acf.sigma2 = variance(x);
    if (!(acf.sigma2 > 0.0)) throw DataError("autocorrelation: input has zero variance");

    std::vector<double> d(x.begin(), x.end());
    for (double& v : d) v -= acf.mu;
    RealFft fft(2 * d.size());
    const auto cov = autocovariance(fft, d, max_lag);
    acf.values.resize(max_lag + 1);
    acf.values[0] = 1.0;
    for (std::size_t s = 1; s <= max_lag; ++s) acf.values[s] = cov[s] / acf.sigma2;
    return acf;
}

ComplexSpectrum dft(std::span<const double> x, double step_seconds) {
    if (x.size() < 2) throw UsageError("dft: need at least 2 samples");
    const std::size_t n = x.size();
    RealFft fft(n);
    std::vector<std::complex<double>> half(fft.bins());
    fft.forward(x, half);

    ComplexSpectrum out;
    out.values.resize(n);
    out.frequencies.resize(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = (k < half.size() ? half[k] : std::conj(half[n - k])) * norm;
        out.frequencies[k] = static_cast<double>(k) / (static_cast<double>(n) * step_seconds);
    }
    return out;
}

Spectrum psd(std::span<const double> x, double step_seconds) {
    if (x.size() < 2) throw UsageError("psd: need at least 2 samples");
    const std::size_t n = x.size();
    RealFft fft(n);
    std::vector<std::complex<double>> half(fft.bins());
    fft.forward(x, half);

    Spectrum out;
    out.kind = SpectrumKind::Psd;
    out.frequencies = one_sided_grid(n, step_seconds);
    out.values.resize(half.size());
    for (std::size_t k = 0; k < half.size(); ++k) {
        out.values[k] = std::norm(half[k]) / static_cast<double>(n);
    }
    fold_one_sided(out.values, n);
    return out;
}

Spectrum ft_autocorr(const Acf& acf, double sigma2, std::size_t n, double step_seconds) {
    if (acf.values.empty()) throw UsageError("ft_autocorr: empty autocorrelation");
    if (n < 2) throw UsageError("ft_autocorr: grid needs at least 2 points");
    if (acf.max_lag() >= n) {
        throw DataError("ft_autocorr: max lag " + std::to_string(acf.max_lag()) +
                        " does not fit an " + std::to_string(n) + "-point grid");
    }
    std::vector<double> lags(n, 0.0);
    for (std::size_t s = 1; s <= acf.max_lag(); ++s) lags[s] = acf.values[s];

    RealFft fft(n);
    std::vector<std::complex<double>> half(fft.bins());
    fft.forward(lags, half);

    Spectrum out;
    out.kind = SpectrumKind::FtAcf;
    out.frequencies = one_sided_grid(n, step_seconds);
    out.values.resize(half.size());
    for (std::size_t k = 0; k < half.size(); ++k) {
        out.values[k] = sigma2 * (1.0 + 2.0 * half[k].real());
    }
    fold_one_sided(out.values, n);
    return out;
}

Acf ensemble_acf(std::span<const double> x, const EnsemblePlan& plan,
                 std::optional<std::size_t> max_lag) {
    const std::size_t len = plan.segment_len;
    if (len < 2) throw UsageError("ensemble: segment length must be at least 2");
    if (len > x.size()) {
        throw UsageError("ensemble: segment length " + std::to_string(len) +
                         " exceeds series length " + std::to_string(x.size()));
    }
    const std::size_t lag_cap = max_lag.value_or(len - 1);
    if (lag_cap >= len) throw UsageError("ensemble: max lag must be below the segment length");

    const std::size_t full = x.size() / len;
    const std::size_t rest = x.size() - full * len;
    std::vector<std::span<const double>> members;
    for (std::size_t j = 0; j < full; ++j) members.push_back(x.subspan(j * len, len));
    if (!plan.drop_remainder && rest >= 2) members.push_back(x.subspan(full * len, rest));

    std::size_t used = 0;
    for (const auto& m : members) used += m.size();
    Acf out;
    out.mu = mean(x.first(used));
    out.segments = members.size();

    std::vector<double> sum(lag_cap + 1, 0.0);
    std::vector<std::size_t> count(lag_cap + 1, 0);
    double sd_sum = 0.0;
    std::vector<double> d;
    RealFft fft(2 * len);
    for (const auto& m : members) {
        const double mu_j = mean(m);
        d.assign(m.begin(), m.end());
        long double about_ensemble = 0.0L;
        for (double& v : d) {
            const long double e = static_cast<long double>(v) - out.mu;
            about_ensemble += e * e;
            v -= mu_j;
        }
        sd_sum += std::sqrt(static_cast<double>(about_ensemble / static_cast<long double>(m.size())));

        const std::size_t lags = std::min(lag_cap, m.size() - 1);
        std::optional<RealFft> short_fft;
        if (m.size() != len) short_fft.emplace(2 * m.size());
        const auto cov = autocovariance(short_fft ? *short_fft : fft, d, lags);
        if (!(cov[0] > 0.0)) throw DataError("ensemble: a segment has zero variance");
        for (std::size_t s = 0; s <= lags; ++s) {
            sum[s] += cov[s] / cov[0];
            ++count[s];
        }
    }
    const double sd = sd_sum / static_cast<double>(members.size());
    out.sigma2 = sd * sd;
    out.values.resize(lag_cap + 1);
    out.values[0] = 1.0;
    for (std::size_t s = 1; s <= lag_cap; ++s) {
        out.values[s] = sum[s] / static_cast<double>(count[s]);
    }
    return out;
}

Spectrum ensemble_psd(std::span<const double> x, const EnsemblePlan& plan, double step_seconds) {
    const std::size_t len = plan.segment_len;
    if (len < 2) throw UsageError("ensemble: segment length must be at least 2");
    if (len > x.size()) {
        throw UsageError("ensemble: segment length " + std::to_string(len) +
                         " exceeds series length " + std::to_string(x.size()));
    }
    const std::size_t members = x.size() / len;
    RealFft fft(len);
    std::vector<std::complex<double>> half(fft.bins());

    Spectrum out;
    out.kind = SpectrumKind::Psd;
    out.frequencies = one_sided_grid(len, step_seconds);
    out.values.assign(half.size(), 0.0);
    for (std::size_t j = 0; j < members; ++j) {
        fft.forward(x.subspan(j * len, len), half);
        for (std::size_t k = 0; k < half.size(); ++k) out.values[k] += std::norm(half[k]);
    }
    const double scale = 1.0 / (static_cast<double>(len) * static_cast<double>(members));
    for (double& v : out.values) v *= scale;
    fold_one_sided(out.values, len);
    return out;
}

void write_spectra_csv(std::ostream& out, std::span<const Spectrum> spectra) {
    out << "frequency_hz,value,kind,smoothed\n";
    for (const auto& s : spectra) {
        const std::string_view kind = to_string(s.kind);
        const char* smoothed = s.smoothed ? "true" : "false";
        for (std::size_t k = 0; k < s.size(); ++k) {
            out << format_double(s.frequencies[k]) << ',' << format_double(s.values[k]) << ','
                << kind << ',' << smoothed << '\n';
        }
    }
}

std::vector<Spectrum> read_spectra_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("frequency_hz,value,kind,smoothed", 0) != 0) {
        throw DataError("spectra CSV must start with header frequency_hz,value,kind,smoothed");
    }
    std::vector<Spectrum> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view rest(line);
        std::string_view fields[4];
        for (int i = 0; i < 4; ++i) {
            const auto comma = rest.find(',');
            if (i < 3 && comma == std::string_view::npos) {
                throw DataError("spectra CSV line " + std::to_string(line_no) + ": expected 4 fields");
            }
            fields[i] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        const SpectrumKind kind = parse_spectrum_kind(fields[2]);
        const bool smoothed = fields[3] == "true";
        if (out.empty() || out.back().kind != kind || out.back().smoothed != smoothed) {
            out.push_back(Spectrum{{}, {}, kind, smoothed});
        }
        out.back().frequencies.push_back(parse_double(fields[0]));
        out.back().values.push_back(parse_double(fields[1]));
    }
    return out;
}

}  // namespace wkstat
