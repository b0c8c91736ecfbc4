#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wkstat/spectral.hpp"
#include "wkstat/window.hpp"
#include "wkstat/wk_test.hpp"

namespace wkstat {

/// Tool version written into every manifest.
std::string_view tool_version();

// ---- configuration -------------------------------------------------------

/// A scalar from a flat TOML file.
using TomlValue = std::variant<std::string, std::int64_t, double, bool>;

/// Parses the flat subset of TOML the config needs: `key = value` lines with
/// basic strings, integers, floats and booleans, plus comments and blank
/// lines. Tables and arrays are rejected. Throws UsageError naming the line.
std::map<std::string, TomlValue> parse_flat_toml(std::istream& in);

/// Test settings as given by a config file or by flags, before window
/// lengths are resolved against a series step.
struct ConfigSettings {
    std::optional<std::string> delta1;
    std::optional<std::string> delta2;
    std::optional<std::int64_t> ensemble_len;
    std::optional<double> smooth_hz;
    std::optional<std::int64_t> smooth_order;
    std::optional<double> band_lo_hz;
    std::optional<double> band_hi_hz;
    std::optional<std::string> metric;
    std::optional<double> threshold;
    std::optional<std::string> returns;
    std::optional<std::string> profile;
    std::optional<std::string> calendar;

    /// Fields set here replace those of base.
    ConfigSettings overlay(const ConfigSettings& base) const;
};

/// Reads a config file. Unknown keys, type mismatches and a non-positive
/// threshold are UsageErrors naming the key.
ConfigSettings read_config_settings(std::istream& in);
ConfigSettings read_config_settings(const std::filesystem::path& path);

/// Documented defaults overlaid with the given settings, windows converted
/// at the given step. The result is validated.
TestConfig resolve_config(const ConfigSettings& settings, std::int64_t step_seconds = 60);

/// resolve_config(read_config_settings(path)).
TestConfig load_config(const std::filesystem::path& path, std::int64_t step_seconds = 60);

Calendar resolved_calendar(const ConfigSettings& settings);

// ---- artifacts -----------------------------------------------------------

/// Git blob id: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_sha1(std::string_view content);
std::string git_blob_sha1(const std::filesystem::path& file);

/// Records what a run read and wrote; serialised as manifest.json.
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> args);

    void add_input(const std::filesystem::path& path);
    /// Path relative to the output directory.
    void add_artifact(const std::filesystem::path& out_dir, const std::string& name);
    void set_config(const TestConfig& cfg);
    void set_extra(const std::string& key, const std::string& value);

    /// Writes out_dir/manifest.json. wall_clock_seconds is recorded as given.
    void write(const std::filesystem::path& out_dir, double wall_clock_seconds) const;

private:
    struct Entry {
        std::string path;
        std::string sha1;
        std::uintmax_t bytes = 0;
    };
    std::string command_;
    std::vector<std::string> args_;
    std::vector<Entry> inputs_;
    std::vector<Entry> artifacts_;
    std::optional<TestConfig> config_;
    std::vector<std::pair<std::string, std::string>> extra_;
};

/// JSON object with every TestConfig field.
std::string config_json(const TestConfig& cfg);

// ---- report --------------------------------------------------------------

struct PlotAnnotation {
    std::string title;
    std::string subtitle;
    std::optional<double> distance;
    std::optional<double> threshold;
    std::optional<bool> stationary;
    std::optional<Band> band;
};

/// Log-log SVG of a PSD curve and an ACF-transform curve on base-10 decades.
/// Bins with f <= 0 or a non-positive value are not drawn.
std::string render_spectra_svg(const Spectrum& psd, const Spectrum& ftac, const PlotAnnotation& note);

/// Renders one SVG per verdict listed in dir/verdicts.jsonl, reading the
/// spectra CSV the verdict names. Returns the written file names.
std::vector<std::string> render_reports(const std::filesystem::path& dir, const std::filesystem::path& out_dir);

// ---- command line ----------------------------------------------------------

/// Runs one command line (without the program name). Returns the exit
/// status: 0 success, 1 usage error, 2 data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wkstat
