#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace wkstat {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based stream: (seed, stream) select an independent sequence and the
/// position is a plain counter, so draws never depend on thread scheduling.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    std::optional<double> spare_;
};

}  // namespace wkstat
