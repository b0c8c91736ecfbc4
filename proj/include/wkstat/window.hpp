#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace wkstat {

/// How calendar units map onto samples.
///   Continuous: 24/7 trading (crypto). 1 day = 1440 min, 1 year = 365 days.
///   Equity:     compacted exchange hours. 1 day = 390 min, 1 week = 5 days,
///               1 year = 252 days.
/// Minutes and hours are wall-clock in both calendars.
enum class Calendar { Continuous, Equity };

Calendar parse_calendar(std::string_view name);
std::string_view to_string(Calendar c);

/// A window length in samples, with the text it was requested as.
struct WindowLen {
    std::size_t samples = 0;
    std::string requested;

    friend bool operator==(const WindowLen&, const WindowLen&) = default;
};

/// Parses "60min", "1week", "12months", "1year", "2h", "3d" or a bare sample
/// count ("4096", "4096samples"). Throws UsageError on unknown units or a
/// non-positive result.
WindowLen parse_window(std::string_view text, std::int64_t step_seconds, Calendar calendar);

WindowLen samples_window(std::size_t n);

}  // namespace wkstat
