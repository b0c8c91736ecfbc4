#include "wkstat/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <new>
#include <stdexcept>
#include <utility>

namespace wkstat {
namespace {

// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
    if (n < 1) throw std::invalid_argument("RealFft: length must be positive");
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    if (!in_ || !out_) {
        release();
        throw std::bad_alloc();
    }
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, static_cast<fftw_complex*>(out_),
                                 FFTW_ESTIMATE);
    if (!plan_) {
        release();
        throw std::runtime_error("RealFft: FFTW planning failed");
    }
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      in_(std::exchange(other.in_, nullptr)),
      out_(std::exchange(other.out_, nullptr)),
      plan_(std::exchange(other.plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
    if (this != &other) {
        release();
        n_ = std::exchange(other.n_, 0);
        in_ = std::exchange(other.in_, nullptr);
        out_ = std::exchange(other.out_, nullptr);
        plan_ = std::exchange(other.plan_, nullptr);
        inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
    }
    return *this;
}

void RealFft::release() noexcept {
    if (plan_ || inverse_plan_) {
        std::lock_guard lock(planner_mutex());
        if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
        if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
        plan_ = nullptr;
        inverse_plan_ = nullptr;
    }
    if (in_) fftw_free(in_);
    if (out_) fftw_free(out_);
    in_ = nullptr;
    out_ = nullptr;
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
    if (in.size() > n_ || out.size() != bins()) {
        throw std::invalid_argument("RealFft::forward: buffer size mismatch");
    }
    std::copy(in.begin(), in.end(), in_);
    std::fill(in_ + in.size(), in_ + n_, 0.0);
    fftw_execute(static_cast<fftw_plan>(plan_));
    std::memcpy(static_cast<void*>(out.data()), out_, bins() * sizeof(fftw_complex));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    if (in.size() != bins() || out.size() != n_) {
        throw std::invalid_argument("RealFft::inverse: buffer size mismatch");
    }
    if (!inverse_plan_) {
        std::lock_guard lock(planner_mutex());
        inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), static_cast<fftw_complex*>(out_),
                                             in_, FFTW_ESTIMATE);
        if (!inverse_plan_) throw std::runtime_error("RealFft: FFTW planning failed");
    }
    // c2r overwrites its input, so it runs on the internal buffers.
    std::memcpy(out_, static_cast<const void*>(in.data()), bins() * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    std::copy(in_, in_ + n_, out.begin());
}

ComplexFft::ComplexFft(std::size_t n, Direction dir) : n_(n) {
    if (n < 1) throw std::invalid_argument("ComplexFft: length must be positive");
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    if (in_ && out_) {
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), static_cast<fftw_complex*>(in_),
                                 static_cast<fftw_complex*>(out_),
                                 dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
    }
    if (!plan_) {
        if (in_) fftw_free(in_);
        if (out_) fftw_free(out_);
        throw std::runtime_error("ComplexFft: allocation or planning failed");
    }
}

ComplexFft::~ComplexFft() {
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
    fftw_free(in_);
    fftw_free(out_);
}

void ComplexFft::execute(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) {
    if (in.size() != n_ || out.size() != n_) {
        throw std::invalid_argument("ComplexFft::execute: buffer size mismatch");
    }
    std::memcpy(in_, static_cast<const void*>(in.data()), n_ * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(plan_));
    std::memcpy(static_cast<void*>(out.data()), out_, n_ * sizeof(fftw_complex));
}

}  // namespace wkstat
