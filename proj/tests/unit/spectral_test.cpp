#include "../oracles.hpp"

#include <wkstat/error.hpp>
#include <wkstat/random.hpp>
#include <wkstat/series.hpp>
#include <wkstat/spectral.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace wkstat;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, 3);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

}  // namespace

TEST(Acf, ZeroLagIsExactlyOne) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = gaussian(257 + seed * 31, seed);
        const auto c = autocorrelation(x, 40);
        EXPECT_EQ(c.values[0], 1.0);
        for (double v : c.values) EXPECT_LE(std::abs(v), 1.0 + 1e-12);
    }
}

TEST(Acf, AlternatingSeries) {
    const std::vector<double> x{1, -1, 1, -1};
    const auto c = autocorrelation(x, 3);
    EXPECT_NEAR(c.values[1], -0.75, 1e-15);
    EXPECT_NEAR(c.values[2], 0.5, 1e-15);
    EXPECT_NEAR(c.values[3], -0.25, 1e-15);
    EXPECT_DOUBLE_EQ(c.sigma2, 1.0);
}

TEST(Acf, MatchesDirectSum) {
    const auto x = gaussian(300, 8);
    const auto c = autocorrelation(x, 299);
    for (std::size_t s = 0; s < x.size(); ++s) ASSERT_NEAR(c.values[s], oracle::direct_acf(x, s), 1e-12);
}

TEST(Acf, WhiteNoiseBand) {
    const std::size_t n = 100000;
    const auto c = autocorrelation(gaussian(n, 1), 100);
    const double band = 3.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t s = 1; s <= 100; ++s) EXPECT_LT(std::abs(c.values[s]), band) << "s = " << s;
}

TEST(Acf, ReversalSymmetry) {
    auto x = gaussian(513, 2);
    const auto fwd = autocorrelation(x, 100);
    std::reverse(x.begin(), x.end());
    const auto rev = autocorrelation(x, 100);
    for (std::size_t s = 0; s <= 100; ++s) ASSERT_NEAR(fwd.values[s], rev.values[s], 1e-12);
}

TEST(Acf, Preconditions) {
    const std::vector<double> flat(16, 2.0);
    EXPECT_THROW(autocorrelation(flat, 3), DataError);
    EXPECT_THROW(autocorrelation(gaussian(16, 0), 16), UsageError);
}

TEST(Dft, MatchesNaiveTransform) {
    for (std::size_t n : {2u, 7u, 64u, 100u}) {
        const auto x = gaussian(n, n);
        const auto fast = dft(x);
        const auto slow = oracle::naive_dft(x);
        ASSERT_EQ(fast.values.size(), n);
        for (std::size_t k = 0; k < n; ++k) ASSERT_LT(std::abs(fast.values[k] - slow[k]), 1e-12);
        EXPECT_DOUBLE_EQ(fast.frequencies[1], 1.0 / (static_cast<double>(n) * 60.0));
    }
}

TEST(Dft, ZeroInputAndCosine) {
    const std::size_t n = 256, k = 9;
    for (auto v : dft(std::vector<double>(n, 0.0)).values) EXPECT_EQ(std::abs(v), 0.0);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::cos(2 * std::numbers::pi * static_cast<double>(k * t) / n);
    const auto X = dft(x);
    for (std::size_t j = 0; j < n; ++j) {
        const double power = std::norm(X.values[j]);
        if (j == k || j == n - k) {
            EXPECT_NEAR(power, n / 4.0, 1e-10);
        } else {
            EXPECT_LT(power, 1e-10);
        }
    }
}

TEST(Dft, Linearity) {
    const auto x = gaussian(128, 1), y = gaussian(128, 2);
    std::vector<double> z(128);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = 2.5 * x[i] - 0.75 * y[i];
    const auto X = dft(x), Y = dft(y), Z = dft(z);
    for (std::size_t k = 0; k < z.size(); ++k) ASSERT_LT(std::abs(Z.values[k] - (2.5 * X.values[k] - 0.75 * Y.values[k])), 1e-10);
}

TEST(Psd, CosinePeak) {
    const std::size_t n = 512, k = 31;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::cos(2 * std::numbers::pi * static_cast<double>(k * t) / n);
    const auto p = psd(x);
    ASSERT_EQ(p.size(), n / 2 + 1);
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j == k) {
            EXPECT_NEAR(p.values[j], n / 2.0, 1e-9);
        } else {
            EXPECT_LT(p.values[j], 1e-10);
        }
    }
    for (double v : psd(std::vector<double>(n, 0.0)).values) EXPECT_EQ(v, 0.0);
}

TEST(Psd, ShiftInvariantUnderRotation) {
    auto x = gaussian(200, 5);
    const auto before = psd(x);
    std::rotate(x.begin(), x.begin() + 37, x.end());
    const auto after = psd(x);
    for (std::size_t k = 0; k < before.size(); ++k) ASSERT_NEAR(after.values[k], before.values[k], 1e-10 * (1 + before.values[k]));
}

TEST(Psd, ParsevalWithFolding) {
    for (std::size_t n : {127u, 128u}) {
        const auto x = gaussian(n, 6);
        const auto p = psd(x);
        double energy = 0.0, folded = 0.0;
        for (double v : x) energy += v * v;
        for (double v : p.values) folded += v;
        EXPECT_NEAR(folded, energy, 1e-10 * energy);
    }
}

TEST(WienerKhinchin, CircularIdentityExact) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = gaussian(64, 100 + seed);
        const auto g = oracle::circular_autocovariance(x);
        const auto G = dft(g);
        const auto X = dft(x);
        for (std::size_t k = 0; k < 64; ++k) {
            const double want = 8.0 * std::norm(X.values[k]);  // sqrt(N) |x_hat|^2
            ASSERT_NEAR(G.values[k].real(), want, 1e-10 * std::max(1.0, want));
            ASSERT_NEAR(G.values[k].imag(), 0.0, 1e-10 * std::max(1.0, want));
        }
    }
}

TEST(WienerKhinchin, SingleSegmentIdentityAwayFromDc) {
    const auto x = gaussian(1000, 77);
    const auto c = autocorrelation(x, 999);
    const auto p = psd(x);
    const auto f = ft_autocorr(c, c.sigma2, x.size());
    for (std::size_t k = 1; k < p.size(); ++k) ASSERT_NEAR(f.values[k], p.values[k], 1e-9 * (1 + p.values[k]));
}

TEST(FtAutocorr, DeltaGivesFlatFoldedSpectrum) {
    Acf delta;
    delta.values.assign(50, 0.0);
    delta.values[0] = 1.0;
    const auto f = ft_autocorr(delta, 2.0, 100);
    ASSERT_EQ(f.size(), 51u);
    EXPECT_DOUBLE_EQ(f.values.front(), 2.0);
    EXPECT_DOUBLE_EQ(f.values.back(), 2.0);
    for (std::size_t k = 1; k + 1 < f.size(); ++k) EXPECT_NEAR(f.values[k], 4.0, 1e-12);
    EXPECT_EQ(f.kind, SpectrumKind::FtAcf);
    delta.values.assign(101, 0.0);
    EXPECT_THROW(ft_autocorr(delta, 1.0, 100), DataError);
}

TEST(Ensemble, OneSegmentIsDirect) {
    const auto x = gaussian(600, 9);
    const auto e = ensemble_acf(x, EnsemblePlan{600, true});
    const auto d = autocorrelation(x, 599);
    EXPECT_EQ(e.segments, 1u);
    EXPECT_NEAR(e.sigma2, d.sigma2, 1e-12);
    for (std::size_t s = 0; s < 600; ++s) ASSERT_NEAR(e.values[s], d.values[s], 1e-12);
    const auto ep = ensemble_psd(x, EnsemblePlan{600, true});
    const auto dp = psd(x);
    for (std::size_t k = 0; k < dp.size(); ++k) ASSERT_NEAR(ep.values[k], dp.values[k], 1e-10 * (1 + dp.values[k]));
}

TEST(Ensemble, AveragesSegments) {
    const auto x = gaussian(1050, 10);
    const EnsemblePlan plan{100, true};
    const auto e = ensemble_acf(x, plan, 20);
    EXPECT_EQ(e.segments, 10u);
    ASSERT_EQ(e.values.size(), 21u);
    for (std::size_t s : {1u, 5u, 20u}) {
        double want = 0.0;
        for (std::size_t j = 0; j < 10; ++j) want += oracle::direct_acf(std::span<const double>(x).subspan(j * 100, 100), s);
        EXPECT_NEAR(e.values[s], want / 10.0, 1e-12);
    }
    const auto p = ensemble_psd(x, plan);
    double want = 0.0;
    for (std::size_t j = 0; j < 10; ++j) want += psd(std::span<const double>(x).subspan(j * 100, 100)).values[7];
    EXPECT_NEAR(p.values[7], want / 10.0, 1e-10);
    EXPECT_DOUBLE_EQ(p.frequencies[1], 1.0 / 6000.0);
}

TEST(Ensemble, SigmaIsMeanSegmentDeviation) {
    std::vector<double> x = gaussian(400, 12);
    for (std::size_t i = 200; i < 400; ++i) x[i] *= 3.0;
    const auto e = ensemble_acf(x, EnsemblePlan{200, true});
    const double mu = mean(x);
    double sd = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        long double ss = 0.0L;
        for (std::size_t i = j * 200; i < (j + 1) * 200; ++i) ss += (x[i] - mu) * (x[i] - mu);
        sd += std::sqrt(static_cast<double>(ss / 200.0L)) / 2.0;
    }
    EXPECT_NEAR(e.sigma2, sd * sd, 1e-12 * sd * sd);
    EXPECT_NEAR(e.mu, mu, 1e-14);
}

TEST(Ensemble, Preconditions) {
    const auto x = gaussian(50, 1);
    EXPECT_THROW(ensemble_acf(x, EnsemblePlan{51, true}), UsageError);
    EXPECT_THROW(ensemble_acf(x, EnsemblePlan{1, true}), UsageError);
    EXPECT_THROW(ensemble_psd(x, EnsemblePlan{51, true}), UsageError);
}

TEST(SpectraCsv, RoundTrip) {
    const auto x = gaussian(64, 4);
    const auto c = autocorrelation(x, 63);
    const std::vector<Spectrum> both{psd(x), ft_autocorr(c, c.sigma2, 64)};
    std::ostringstream out;
    write_spectra_csv(out, both);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "frequency_hz,value,kind,smoothed");
    std::istringstream in(out.str());
    const auto back = read_spectra_csv(in);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].kind, both[i].kind);
        EXPECT_EQ(back[i].values, both[i].values);
        EXPECT_EQ(back[i].frequencies, both[i].frequencies);
    }
    EXPECT_NO_THROW(require_same_grid(back[0], back[1]));
    EXPECT_THROW(require_same_grid(back[0], psd(gaussian(32, 1))), DataError);
}
