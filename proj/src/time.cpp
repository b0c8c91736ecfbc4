#include "wkstat/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "wkstat/error.hpp"

namespace wkstat {
namespace {

int read_digits(std::string_view text, std::size_t& pos, std::size_t count) {
    if (pos + count > text.size()) {
        throw DataError("truncated timestamp '" + std::string(text) + "'");
    }
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = text[pos + i];
        if (c < '0' || c > '9') {
            throw DataError("malformed timestamp '" + std::string(text) + "'");
        }
        value = value * 10 + (c - '0');
    }
    pos += count;
    return value;
}

void expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
        throw DataError("malformed timestamp '" + std::string(text) + "'");
    }
    ++pos;
}

std::int64_t parse_integer(std::string_view text) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw DataError("malformed epoch timestamp '" + std::string(text) + "'");
    }
    return value;
}

bool all_digits(std::string_view text) {
    if (text.empty()) return false;
    std::size_t i = (text.front() == '-') ? 1 : 0;
    if (i == text.size()) return false;
    for (; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    return true;
}

// Division rounding toward negative infinity.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

TimeFormat parse_time_format(std::string_view name) {
    if (name == "auto") return TimeFormat::Auto;
    if (name == "iso8601") return TimeFormat::Iso8601;
    if (name == "epoch_s") return TimeFormat::EpochSeconds;
    if (name == "epoch_ms") return TimeFormat::EpochMillis;
    throw UsageError("unknown time format '" + std::string(name) +
                     "' (expected iso8601, epoch_s, epoch_ms or auto)");
}

Instant parse_iso8601(std::string_view raw) {
    using namespace std::chrono;
    const std::string_view text = trim(raw);
    std::size_t pos = 0;
    const int y = read_digits(text, pos, 4);
    expect(text, pos, '-');
    const int mo = read_digits(text, pos, 2);
    expect(text, pos, '-');
    const int d = read_digits(text, pos, 2);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw DataError("invalid calendar date '" + std::string(text) + "'");
    }

    int hh = 0, mm = 0, ss = 0;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
        ++pos;
        hh = read_digits(text, pos, 2);
        expect(text, pos, ':');
        mm = read_digits(text, pos, 2);
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
            ss = read_digits(text, pos, 2);
            if (pos < text.size() && text[pos] == '.') {
                ++pos;
                while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
            }
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) {
        throw DataError("invalid time of day '" + std::string(text) + "'");
    }

    std::int64_t offset = 0;
    if (pos < text.size()) {
        const char c = text[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            ++pos;
            const int oh = read_digits(text, pos, 2);
            if (pos < text.size() && text[pos] == ':') ++pos;
            const int om = read_digits(text, pos, 2);
            offset = (c == '+' ? 1 : -1) * (oh * 3600 + om * 60);
        }
    }
    if (pos != text.size()) {
        throw DataError("trailing characters in timestamp '" + std::string(text) + "'");
    }

    const auto days = sys_days{ymd}.time_since_epoch().count();
    return Instant{static_cast<std::int64_t>(days) * 86400 + hh * 3600 + mm * 60 + ss - offset};
}

Instant parse_timestamp(std::string_view raw, TimeFormat format) {
    const std::string_view text = trim(raw);
    switch (format) {
        case TimeFormat::Iso8601:
            return parse_iso8601(text);
        case TimeFormat::EpochSeconds:
            return Instant{parse_integer(text)};
        case TimeFormat::EpochMillis:
            return Instant{floor_div(parse_integer(text), 1000)};
        case TimeFormat::Auto:
            break;
    }
    if (all_digits(text)) {
        const std::size_t digits = text.size() - (text.front() == '-' ? 1 : 0);
        return digits >= 12 ? Instant{floor_div(parse_integer(text), 1000)}
                            : Instant{parse_integer(text)};
    }
    return parse_iso8601(text);
}

std::string format_iso8601(Instant t) {
    using namespace std::chrono;
    const std::int64_t days = floor_div(t.seconds, 86400);
    const std::int64_t secs = t.seconds - days * 86400;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                  static_cast<int>(secs % 60));
    return buf;
}

bool is_date_only(std::string_view raw) {
    const std::string_view text = trim(raw);
    return text.size() == 10 && text[4] == '-' && text[7] == '-';
}

}  // namespace wkstat
