#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace wkstat {

/// Unnormalized forward real-to-complex DFT of fixed length n:
/// X_k = sum_t x_t exp(-2 pi i k t / n), k = 0 .. n/2.
/// Owns its FFTW plan and buffers; plans are created with FFTW_ESTIMATE so
/// results are bitwise reproducible.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&& other) noexcept;
    RealFft& operator=(RealFft&& other) noexcept;

    std::size_t size() const { return n_; }
    std::size_t bins() const { return n_ / 2 + 1; }

    /// in.size() must be <= n (shorter input is zero-padded); out.size() must be bins().
    void forward(std::span<const double> in, std::span<std::complex<double>> out);

    /// Unnormalized inverse: x_t = sum_k X_k exp(2 pi i k t / n) over the full
    /// Hermitian spectrum given by its bins() half. out.size() must be n.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    void release() noexcept;

    std::size_t n_ = 0;
    double* in_ = nullptr;
    void* out_ = nullptr;
    void* plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Unnormalized complex DFT of fixed length n in either direction.
class ComplexFft {
public:
    enum class Direction { Forward, Backward };

    ComplexFft(std::size_t n, Direction dir);
    ~ComplexFft();
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;

    std::size_t size() const { return n_; }
    void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

private:
    std::size_t n_ = 0;
    void* in_ = nullptr;
    void* out_ = nullptr;
    void* plan_ = nullptr;
};

}  // namespace wkstat
