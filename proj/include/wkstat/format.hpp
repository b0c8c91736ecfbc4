#pragma once

#include <charconv>
#include <string>

namespace wkstat {

/// Shortest round-trip decimal form; locale-independent so artifacts are
/// byte-identical across runs.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace wkstat
