#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wkstat/time.hpp"

namespace wkstat {

struct Tick {
    Instant time;
    double price = 0.0;
};

/// Timestamped prices, strictly increasing in time, all prices finite and > 0.
struct RawTickTable {
    std::vector<Tick> rows;
};

/// Uniformly indexed price levels. Sample i (0-based) sits at
/// origin_map[i] when the map is present, otherwise at start + i * step.
struct TickSeries {
    std::vector<double> values;
    Instant start;
    std::int64_t step_seconds = 60;
    std::optional<std::vector<Instant>> origin_map;
    std::string label;

    std::size_t size() const { return values.size(); }
    Instant time_at(std::size_t i) const;

    /// Throws DataError if the invariants (N >= 2, finite values, step > 0,
    /// strictly increasing origin map of length N) do not hold.
    void validate() const;

    friend bool operator==(const TickSeries&, const TickSeries&) = default;
};

enum class GapPolicy { Compact, ForwardFill, Error };

GapPolicy parse_gap_policy(std::string_view name);

struct CsvSchema {
    std::string time_column = "timestamp";
    std::string price_column = "price";
    TimeFormat time_format = TimeFormat::Auto;
};

/// Reads a headed CSV file. Rows are sorted by time on return; duplicate
/// timestamps, non-positive prices and unparseable rows raise DataError
/// naming the offending line.
RawTickTable load_csv(const std::filesystem::path& path, const CsvSchema& schema);
RawTickTable read_csv(std::istream& in, const CsvSchema& schema);

TickSeries to_tick_series(const RawTickTable& table, GapPolicy policy,
                          std::int64_t step_seconds = 60, std::string label = {});

/// Samples whose original timestamps fall in [start, end], renumbered from 0.
TickSeries slice_by_dates(const TickSeries& series, Instant start, Instant end);

/// Writes the ingest CSV format: header "timestamp,price", ISO-8601 UTC times.
void write_tick_csv(std::ostream& out, const TickSeries& series);

}  // namespace wkstat
