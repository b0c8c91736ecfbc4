#include "wkstat/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "wkstat/error.hpp"
#include "wkstat/format.hpp"

namespace wkstat {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    }
    return fields;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw UsageError("CSV header has no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

double parse_price(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw DataError("malformed price '" + text + "'");
    }
    return value;
}

}  // namespace

Instant TickSeries::time_at(std::size_t i) const {
    if (origin_map) return (*origin_map)[i];
    return Instant{start.seconds + static_cast<std::int64_t>(i) * step_seconds};
}

void TickSeries::validate() const {
    if (values.size() < 2) throw DataError("series '" + label + "' has fewer than 2 samples");
    if (step_seconds <= 0) throw DataError("series step must be positive");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DataError("series '" + label + "' has a non-finite value at index " +
                            std::to_string(i));
        }
    }
    if (origin_map) {
        if (origin_map->size() != values.size()) {
            throw DataError("origin map length does not match series length");
        }
        for (std::size_t i = 1; i < origin_map->size(); ++i) {
            if (!((*origin_map)[i - 1] < (*origin_map)[i])) {
                throw DataError("origin map is not strictly increasing");
            }
        }
    }
}

GapPolicy parse_gap_policy(std::string_view name) {
    if (name == "compact") return GapPolicy::Compact;
    if (name == "ffill" || name == "forward-fill") return GapPolicy::ForwardFill;
    if (name == "error") return GapPolicy::Error;
    throw UsageError("unknown gap policy '" + std::string(name) +
                     "' (expected compact, ffill or error)");
}

RawTickTable read_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV input is empty (header row required)");
    const auto header = split_csv_line(line);
    const std::size_t tcol = column_index(header, schema.time_column);
    const std::size_t pcol = column_index(header, schema.price_column);
    const std::size_t needed = std::max(tcol, pcol) + 1;

    RawTickTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        const std::string where = "line " + std::to_string(line_no);
        if (fields.size() < needed) {
            throw DataError(where + ": expected at least " + std::to_string(needed) + " fields");
        }
        Tick tick;
        try {
            tick.time = parse_timestamp(fields[tcol], schema.time_format);
            tick.price = parse_price(fields[pcol]);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!std::isfinite(tick.price)) throw DataError(where + ": non-finite price");
        if (tick.price <= 0.0) {
            throw DataError(where + ": non-positive price " + fields[pcol]);
        }
        table.rows.push_back(tick);
    }

    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const Tick& a, const Tick& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (table.rows[i].time == table.rows[i - 1].time) {
            throw DataError("duplicate timestamp " + format_iso8601(table.rows[i].time));
        }
    }
    return table;
}

RawTickTable load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    return read_csv(in, schema);
}

TickSeries to_tick_series(const RawTickTable& table, GapPolicy policy, std::int64_t step_seconds,
                          std::string label) {
    if (table.rows.empty()) throw DataError("cannot build a series from an empty table");
    if (step_seconds <= 0) throw UsageError("step must be positive");

    TickSeries series;
    series.start = table.rows.front().time;
    series.step_seconds = step_seconds;
    series.label = std::move(label);

    if (policy == GapPolicy::Compact) {
        std::vector<Instant> origin;
        origin.reserve(table.rows.size());
        series.values.reserve(table.rows.size());
        for (const auto& row : table.rows) {
            series.values.push_back(row.price);
            origin.push_back(row.time);
        }
        series.origin_map = std::move(origin);
        return series;
    }

    const std::int64_t t0 = series.start.seconds;
    for (const auto& row : table.rows) {
        if ((row.time.seconds - t0) % step_seconds != 0) {
            throw DataError("timestamp " + format_iso8601(row.time) +
                            " is not on the sampling grid");
        }
    }
    const std::int64_t span = (table.rows.back().time.seconds - t0) / step_seconds + 1;
    series.values.reserve(static_cast<std::size_t>(span));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (i > 0) {
            const std::int64_t expected = table.rows[i - 1].time.seconds + step_seconds;
            if (table.rows[i].time.seconds != expected) {
                if (policy == GapPolicy::Error) {
                    throw DataError("gap in series: first missing sample at " +
                                    format_iso8601(Instant{expected}));
                }
                for (std::int64_t t = expected; t < table.rows[i].time.seconds; t += step_seconds) {
                    series.values.push_back(table.rows[i - 1].price);
                }
            }
        }
        series.values.push_back(table.rows[i].price);
    }
    return series;
}

TickSeries slice_by_dates(const TickSeries& series, Instant start, Instant end) {
    if (!(start < end)) throw UsageError("slice start must precede slice end");
    TickSeries out;
    out.step_seconds = series.step_seconds;
    out.label = series.label;
    std::vector<Instant> origin;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const Instant t = series.time_at(i);
        if (t < start || end < t) continue;
        out.values.push_back(series.values[i]);
        origin.push_back(t);
    }
    if (out.values.empty()) {
        throw DataError("slice [" + format_iso8601(start) + ", " + format_iso8601(end) +
                        "] contains no samples");
    }
    out.start = origin.front();
    if (series.origin_map) out.origin_map = std::move(origin);
    return out;
}

void write_tick_csv(std::ostream& out, const TickSeries& series) {
    out << "timestamp,price\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_iso8601(series.time_at(i)) << ',' << format_double(series.values[i]) << '\n';
    }
}

}  // namespace wkstat
