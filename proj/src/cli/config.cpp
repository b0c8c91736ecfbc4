#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "wkstat/cli.hpp"
#include "wkstat/error.hpp"

namespace wkstat {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool bare_key_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

// Parses a quoted string at the start of text; returns the value and the
// unconsumed remainder.
std::pair<std::string, std::string_view> parse_string(std::string_view text, const std::string& where) {
    const char quote = text.front();
    std::string value;
    std::size_t i = 1;
    for (; i < text.size() && text[i] != quote; ++i) {
        char c = text[i];
        if (quote == '"' && c == '\\') {
            if (++i == text.size()) break;
            switch (text[i]) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: throw UsageError(where + ": unsupported escape in string");
            }
        }
        value += c;
    }
    if (i >= text.size()) throw UsageError(where + ": unterminated string");
    return {value, text.substr(i + 1)};
}

TomlValue parse_scalar(std::string_view text, const std::string& where) {
    if (text.empty()) throw UsageError(where + ": missing value");
    if (text.front() == '"' || text.front() == '\'') {
        auto [value, rest] = parse_string(text, where);
        rest = trim(rest);
        if (!rest.empty() && rest.front() != '#') throw UsageError(where + ": unexpected text after string");
        return value;
    }
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = trim(text.substr(0, hash));
    if (text.front() == '[' || text.front() == '{') throw UsageError(where + ": arrays and inline tables are not supported");
    if (text == "true") return true;
    if (text == "false") return false;
    std::string digits;
    for (char c : text) {
        if (c != '_') digits += c;
    }
    const char* first = digits.data() + (digits.front() == '+' ? 1 : 0);
    const char* last = digits.data() + digits.size();
    const bool looks_float = digits.find_first_of(".eE") != std::string::npos || digits.find("inf") != std::string::npos ||
                             digits.find("nan") != std::string::npos;
    if (!looks_float) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec == std::errc() && p == last) return v;
    } else {
        double v = 0.0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec == std::errc() && p == last) return v;
    }
    throw UsageError(where + ": cannot parse value '" + std::string(text) + "' (strings must be quoted)");
}

std::string type_name(const TomlValue& v) {
    switch (v.index()) {
        case 0: return "string";
        case 1: return "integer";
        case 2: return "float";
        default: return "boolean";
    }
}

std::string expect_string(const std::string& key, const TomlValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw UsageError(key + ": expected a string, got " + type_name(v));
}

std::int64_t expect_int(const std::string& key, const TomlValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw UsageError(key + ": expected an integer, got " + type_name(v));
}

double expect_number(const std::string& key, const TomlValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw UsageError(key + ": expected a number, got " + type_name(v));
}

template <typename T>
void take(std::optional<T>& field, const std::optional<T>& over) {
    if (over) field = over;
}

WindowLen window_for(const std::string& key, const std::string& text, std::int64_t step, Calendar calendar) {
    try {
        return parse_window(text, step, calendar);
    } catch (const UsageError& e) {
        throw UsageError(key + ": " + e.what());
    }
}

}  // namespace

std::map<std::string, TomlValue> parse_flat_toml(std::istream& in) {
    std::map<std::string, TomlValue> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = "config line " + std::to_string(line_no);
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (text.front() == '[') throw UsageError(where + ": tables are not supported; use top-level keys");
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw UsageError(where + ": expected key = value");
        std::string_view key = trim(text.substr(0, eq));
        if (key.size() >= 2 && (key.front() == '"' || key.front() == '\'') && key.back() == key.front()) {
            key = key.substr(1, key.size() - 2);
        } else if (key.empty() || !std::all_of(key.begin(), key.end(), bare_key_char)) {
            throw UsageError(where + ": invalid key '" + std::string(key) + "'");
        }
        const std::string k(key);
        if (out.count(k)) throw UsageError(where + ": duplicate key '" + k + "'");
        out.emplace(k, parse_scalar(trim(text.substr(eq + 1)), where + " (" + k + ")"));
    }
    return out;
}

ConfigSettings ConfigSettings::overlay(const ConfigSettings& base) const {
    ConfigSettings out = base;
    take(out.delta1, delta1);
    take(out.delta2, delta2);
    take(out.ensemble_len, ensemble_len);
    take(out.smooth_hz, smooth_hz);
    take(out.smooth_order, smooth_order);
    take(out.band_lo_hz, band_lo_hz);
    take(out.band_hi_hz, band_hi_hz);
    take(out.metric, metric);
    take(out.threshold, threshold);
    take(out.returns, returns);
    take(out.profile, profile);
    take(out.calendar, calendar);
    return out;
}

ConfigSettings read_config_settings(std::istream& in) {
    ConfigSettings s;
    for (const auto& [key, value] : parse_flat_toml(in)) {
        if (key == "delta1") s.delta1 = expect_string(key, value);
        else if (key == "delta2") s.delta2 = expect_string(key, value);
        else if (key == "ensemble_len") s.ensemble_len = expect_int(key, value);
        else if (key == "smooth_hz") s.smooth_hz = expect_number(key, value);
        else if (key == "smooth_order") s.smooth_order = expect_int(key, value);
        else if (key == "band_lo_hz") s.band_lo_hz = expect_number(key, value);
        else if (key == "band_hi_hz") s.band_hi_hz = expect_number(key, value);
        else if (key == "metric") s.metric = expect_string(key, value);
        else if (key == "threshold") s.threshold = expect_number(key, value);
        else if (key == "returns") s.returns = expect_string(key, value);
        else if (key == "profile") s.profile = expect_string(key, value);
        else if (key == "calendar") s.calendar = expect_string(key, value);
        else throw UsageError("unknown config key '" + key + "'");
    }
    if (s.threshold && !(*s.threshold > 0.0)) {
        throw UsageError("threshold: must be positive, got " + std::to_string(*s.threshold));
    }
    return s;
}

ConfigSettings read_config_settings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
    return read_config_settings(in);
}

Calendar resolved_calendar(const ConfigSettings& s) {
    return s.calendar ? parse_calendar(*s.calendar) : Calendar::Continuous;
}

TestConfig resolve_config(const ConfigSettings& s, std::int64_t step_seconds) {
    const Calendar calendar = resolved_calendar(s);
    const Profile profile = s.profile ? parse_profile(*s.profile) : Profile::Segment;
    TestConfig cfg = default_config(profile, calendar, step_seconds);
    if (s.delta1) cfg.delta1 = window_for("delta1", *s.delta1, step_seconds, calendar);
    if (s.delta2) cfg.delta2 = window_for("delta2", *s.delta2, step_seconds, calendar);
    if (s.ensemble_len) {
        if (*s.ensemble_len < 2) throw UsageError("ensemble_len: must be at least 2");
        cfg.ensemble_len = static_cast<std::size_t>(*s.ensemble_len);
    }
    if (s.smooth_hz) cfg.smooth_hz = *s.smooth_hz;
    if (s.smooth_order) cfg.smooth_order = static_cast<int>(*s.smooth_order);
    if (s.band_lo_hz.has_value() != s.band_hi_hz.has_value()) {
        throw UsageError("band_lo_hz and band_hi_hz must be given together");
    }
    if (s.band_lo_hz) cfg.band = Band{*s.band_lo_hz, *s.band_hi_hz};
    if (s.metric) cfg.metric = parse_metric(*s.metric);
    if (s.threshold) {
        if (!(*s.threshold > 0.0)) throw UsageError("threshold: must be positive");
        cfg.threshold = *s.threshold;
    }
    if (s.returns) cfg.returns = parse_return_mode(*s.returns);
    cfg.validate();
    return cfg;
}

TestConfig load_config(const std::filesystem::path& path, std::int64_t step_seconds) {
    return resolve_config(read_config_settings(path), step_seconds);
}

}  // namespace wkstat
