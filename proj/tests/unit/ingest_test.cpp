#include <wkstat/error.hpp>
#include <wkstat/ingest.hpp>
#include <wkstat/time.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace wkstat;

namespace {

RawTickTable parse(const std::string& text, CsvSchema schema = {}) {
    std::istringstream in(text);
    return read_csv(in, schema);
}

std::string what_of(auto&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

// Friday 2019-04-05 15:59 New York is 19:59 UTC; Monday 09:30 is 13:30 UTC.
const char* kWeekendCsv =
    "timestamp,price\n"
    "2019-04-05T19:58:00Z,2890.0\n"
    "2019-04-05T19:59:00Z,2892.5\n"
    "2019-04-08T13:30:00Z,2894.0\n"
    "2019-04-08T13:31:00Z,2893.0\n";

}  // namespace

TEST(Time, ParsesIsoVariants) {
    EXPECT_EQ(parse_iso8601("2019-04-02T00:00:00Z").seconds, 1554163200);
    EXPECT_EQ(parse_iso8601("2019-04-02 00:00").seconds, 1554163200);
    EXPECT_EQ(parse_iso8601("2019-04-02").seconds, 1554163200);
    EXPECT_EQ(parse_iso8601("2019-04-02T02:00:00+02:00").seconds, 1554163200);
    EXPECT_EQ(parse_iso8601("2019-04-01T20:00:00.750-0400").seconds, 1554163200);
    EXPECT_THROW(parse_iso8601("2019-02-30"), DataError);
    EXPECT_THROW(parse_iso8601("yesterday"), DataError);
}

TEST(Time, EpochMillisecondsConvert) {
    EXPECT_EQ(parse_timestamp("1554163200000", TimeFormat::EpochMillis).seconds, 1554163200);
    EXPECT_EQ(parse_timestamp("1554163200000", TimeFormat::Auto).seconds, 1554163200);
    EXPECT_EQ(parse_timestamp("1554163200", TimeFormat::Auto).seconds, 1554163200);
    EXPECT_EQ(format_iso8601(Instant{1554163200}), "2019-04-02T00:00:00Z");
    EXPECT_EQ(format_iso8601(Instant{-1}), "1969-12-31T23:59:59Z");
}

TEST(Time, IsoRoundTrip) {
    for (std::int64_t s : {0LL, 951782400LL, 1554163200LL, 1703980799LL, 4102444800LL}) {
        EXPECT_EQ(parse_iso8601(format_iso8601(Instant{s})).seconds, s);
    }
}

TEST(Ingest, DirectFieldMapping) {
    const auto table = parse("timestamp,price\n2019-04-02T00:00:00Z,4100.5\n2019-04-02T00:01:00Z,4101\n");
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].time.seconds, 1554163200);
    EXPECT_DOUBLE_EQ(table.rows[0].price, 4100.5);
}

TEST(Ingest, EpochMillisColumn) {
    CsvSchema schema;
    schema.time_column = "ts";
    schema.price_column = "close";
    schema.time_format = TimeFormat::EpochMillis;
    const auto table = parse("open,ts,close\n1,1554163200000,7.5\n", schema);
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(format_iso8601(table.rows[0].time), "2019-04-02T00:00:00Z");
    EXPECT_DOUBLE_EQ(table.rows[0].price, 7.5);
}

TEST(Ingest, NonPositivePriceNamesRow) {
    const auto msg = what_of([] { parse("timestamp,price\n2019-04-02T00:00:00Z,1\n2019-04-02T00:01:00Z,-3\n"); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("non-positive"), std::string::npos) << msg;
    EXPECT_THROW(parse("timestamp,price\n2019-04-02T00:00:00Z,0\n"), DataError);
}

TEST(Ingest, DuplicateTimestampIsError) {
    EXPECT_THROW(parse("timestamp,price\n2019-04-02T00:00:00Z,1\n2019-04-02T00:00:00Z,2\n"), DataError);
}

TEST(Ingest, RowsAreSortedAndQuotedFieldsAccepted) {
    const auto table = parse("timestamp,price\n\"2019-04-02T00:01:00Z\",\"2\"\n2019-04-02T00:00:00Z,1\n");
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_LT(table.rows[0].time, table.rows[1].time);
    EXPECT_DOUBLE_EQ(table.rows[0].price, 1.0);
}

TEST(Ingest, MissingColumnAndEmptyInput) {
    EXPECT_THROW(parse("time,price\n1,2\n"), UsageError);
    EXPECT_THROW(parse(""), DataError);
}

TEST(Ingest, CompactMakesGapAdjacent) {
    const auto series = to_tick_series(parse(kWeekendCsv), GapPolicy::Compact);
    ASSERT_EQ(series.size(), 4u);
    ASSERT_TRUE(series.origin_map.has_value());
    EXPECT_EQ(format_iso8601(series.time_at(1)), "2019-04-05T19:59:00Z");
    EXPECT_EQ(format_iso8601(series.time_at(2)), "2019-04-08T13:30:00Z");
    EXPECT_DOUBLE_EQ(series.values[2], 2894.0);
}

TEST(Ingest, ForwardFillCountsGapMinutes) {
    const auto series = to_tick_series(parse(kWeekendCsv), GapPolicy::ForwardFill);
    // 19:59 Fri to 13:30 Mon is 65 h 31 min = 3931 steps, so 3930 new samples.
    const std::size_t inserted = series.size() - 4;
    EXPECT_EQ(inserted, 3930u);
    EXPECT_FALSE(series.origin_map.has_value());
    for (std::size_t i = 2; i < 2 + inserted; ++i) ASSERT_DOUBLE_EQ(series.values[i], 2892.5);
    EXPECT_DOUBLE_EQ(series.values[2 + inserted], 2894.0);
    EXPECT_EQ(format_iso8601(series.time_at(2 + inserted)), "2019-04-08T13:30:00Z");
}

TEST(Ingest, ErrorModeNamesFirstMissingMinute) {
    const auto msg = what_of([] { to_tick_series(parse(kWeekendCsv), GapPolicy::Error); });
    EXPECT_NE(msg.find("2019-04-05T20:00:00Z"), std::string::npos) << msg;
}

TEST(Ingest, CompactPreservesPriceMultiset) {
    std::string csv = "timestamp,price\n";
    std::vector<double> prices;
    for (int i = 0; i < 200; ++i) {
        const double p = 100.0 + (i * 37 % 101) * 0.25;
        prices.push_back(p);
        const long long slot = i * 7 % 200;  // shuffled rows, overnight gap after slot 99
        csv += format_iso8601(Instant{1554163200 + 60 * slot + (slot > 99 ? 86400 : 0)}) + "," +
               std::to_string(p) + "\n";
    }
    const auto series = to_tick_series(parse(csv), GapPolicy::Compact);
    auto a = series.values;
    std::vector<double> b;
    for (double p : prices) b.push_back(std::stod(std::to_string(p)));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
}

namespace {

TickSeries bitcoin_like() {
    // One sample every 6 hours from 2019-04-02 to 2023-12-31.
    std::string csv = "timestamp,price\n";
    const std::int64_t t0 = parse_iso8601("2019-04-02").seconds;
    const std::int64_t t1 = parse_iso8601("2023-12-31T18:00:00Z").seconds;
    int i = 0;
    for (std::int64_t t = t0; t <= t1; t += 6 * 3600, ++i) {
        csv += format_iso8601(Instant{t}) + "," + std::to_string(5000 + i % 97) + "\n";
    }
    return to_tick_series(parse(csv), GapPolicy::Compact, 60, "btc");
}

}  // namespace

TEST(Slice, BitcoinSegmentsPartitionTheSeries) {
    const auto full = bitcoin_like();
    const auto day_end = [](const char* d) { return Instant{parse_iso8601(d).seconds + 86399}; };
    const auto s1 = slice_by_dates(full, parse_iso8601("2019-04-02"), day_end("2020-12-31"));
    const auto s2 = slice_by_dates(full, parse_iso8601("2021-01-01"), day_end("2022-05-03"));
    const auto s3 = slice_by_dates(full, parse_iso8601("2022-05-04"), day_end("2023-12-31"));
    EXPECT_EQ(format_iso8601(s1.time_at(0)), "2019-04-02T00:00:00Z");
    EXPECT_EQ(format_iso8601(s2.time_at(0)), "2021-01-01T00:00:00Z");
    EXPECT_EQ(format_iso8601(s3.time_at(s3.size() - 1)), "2023-12-31T18:00:00Z");
    std::vector<double> joined = s1.values;
    joined.insert(joined.end(), s2.values.begin(), s2.values.end());
    joined.insert(joined.end(), s3.values.begin(), s3.values.end());
    EXPECT_EQ(joined, full.values);
}

TEST(Slice, FullRangeIsIdentity) {
    const auto full = bitcoin_like();
    const auto same = slice_by_dates(full, full.time_at(0), full.time_at(full.size() - 1));
    EXPECT_EQ(same.values, full.values);
    EXPECT_EQ(same.origin_map, full.origin_map);
}

TEST(Slice, Idempotent) {
    const auto full = bitcoin_like();
    const Instant a = parse_iso8601("2020-03-01"), b = parse_iso8601("2021-07-15T12:00:00Z");
    const auto once = slice_by_dates(full, a, b);
    EXPECT_EQ(slice_by_dates(once, a, b), once);
}

TEST(Slice, EmptyRangeIsError) {
    const auto full = bitcoin_like();
    EXPECT_THROW(slice_by_dates(full, parse_iso8601("2030-01-01"), parse_iso8601("2030-02-01")), DataError);
}

TEST(Ingest, CsvWriterRoundTrips) {
    const auto series = to_tick_series(parse(kWeekendCsv), GapPolicy::Compact);
    std::ostringstream out;
    write_tick_csv(out, series);
    const auto back = to_tick_series(parse(out.str()), GapPolicy::Compact);
    EXPECT_EQ(back.values, series.values);
    EXPECT_EQ(back.origin_map, series.origin_map);
}

TEST(TickSeries, ValidateRejectsShortSeries) {
    TickSeries s;
    s.values = {1.0};
    EXPECT_THROW(s.validate(), DataError);
}
