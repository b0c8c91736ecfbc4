#include "wkstat/window.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "wkstat/error.hpp"

namespace wkstat {
namespace {

constexpr double kMinutesPerDay[] = {1440.0, 390.0};
constexpr double kDaysPerWeek[] = {7.0, 5.0};
constexpr double kDaysPerYear[] = {365.0, 252.0};

}  // namespace

Calendar parse_calendar(std::string_view name) {
    if (name == "continuous") return Calendar::Continuous;
    if (name == "equity") return Calendar::Equity;
    throw UsageError("unknown calendar '" + std::string(name) + "' (expected continuous or equity)");
}

std::string_view to_string(Calendar c) {
    return c == Calendar::Continuous ? "continuous" : "equity";
}

WindowLen samples_window(std::size_t n) { return WindowLen{n, std::to_string(n) + "samples"}; }

WindowLen parse_window(std::string_view text, std::int64_t step_seconds, Calendar calendar) {
    if (step_seconds <= 0) throw UsageError("step must be positive");
    std::size_t pos = 0;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
        ++pos;
    }
    double amount = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + pos, amount);
    if (pos == 0 || ec != std::errc{} || ptr != text.data() + pos) {
        throw UsageError("malformed window '" + std::string(text) + "'");
    }
    std::string_view unit = text.substr(pos);
    while (!unit.empty() && unit.front() == ' ') unit.remove_prefix(1);

    const auto idx = static_cast<std::size_t>(calendar);
    const double minutes_per_day = kMinutesPerDay[idx];
    double minutes = -1.0;
    double samples = -1.0;
    if (unit.empty() || unit == "samples" || unit == "sample") {
        samples = amount;
    } else if (unit == "s" || unit == "sec" || unit == "secs") {
        samples = amount / static_cast<double>(step_seconds);
    } else if (unit == "min" || unit == "mins" || unit == "minute" || unit == "minutes" || unit == "m") {
        minutes = amount;
    } else if (unit == "h" || unit == "hour" || unit == "hours") {
        minutes = amount * 60.0;
    } else if (unit == "d" || unit == "day" || unit == "days") {
        minutes = amount * minutes_per_day;
    } else if (unit == "w" || unit == "week" || unit == "weeks") {
        minutes = amount * kDaysPerWeek[idx] * minutes_per_day;
    } else if (unit == "month" || unit == "months") {
        minutes = amount * kDaysPerYear[idx] * minutes_per_day / 12.0;
    } else if (unit == "y" || unit == "year" || unit == "years") {
        minutes = amount * kDaysPerYear[idx] * minutes_per_day;
    } else {
        throw UsageError("unknown window unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
    }
    if (minutes >= 0.0) samples = minutes * 60.0 / static_cast<double>(step_seconds);

    const double rounded = std::round(samples);
    if (rounded < 1.0) {
        throw UsageError("window '" + std::string(text) + "' is shorter than one sample");
    }
    return WindowLen{static_cast<std::size_t>(rounded), std::string(text)};
}

}  // namespace wkstat
