#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wkstat {

/// UTC instant, whole seconds since the Unix epoch.
struct Instant {
    std::int64_t seconds = 0;

    friend constexpr auto operator<=>(const Instant&, const Instant&) = default;
};

enum class TimeFormat { Auto, Iso8601, EpochSeconds, EpochMillis };

TimeFormat parse_time_format(std::string_view name);

/// Parses "YYYY-MM-DD[(T| )hh:mm[:ss[.fff]]][Z|(+|-)hh[:]mm]". A missing
/// offset is read as UTC. Fractional seconds are truncated.
Instant parse_iso8601(std::string_view text);

/// Parses a timestamp in the requested format. Auto treats all-digit text
/// with 12 or more digits as milliseconds and shorter digit runs as seconds.
Instant parse_timestamp(std::string_view text, TimeFormat format);

/// "YYYY-MM-DDThh:mm:ssZ"
std::string format_iso8601(Instant t);

/// True when the text is a bare date without a time-of-day part.
bool is_date_only(std::string_view text);

}  // namespace wkstat
