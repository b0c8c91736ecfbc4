#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <set>

#include "wkstat/cli.hpp"
#include "wkstat/error.hpp"
#include "wkstat/format.hpp"
#include "wkstat/ingest.hpp"
#include "wkstat/series.hpp"
#include "wkstat/synth.hpp"

namespace wkstat {
namespace {

namespace fs = std::filesystem;

struct InputOptions {
    std::string input;
    std::string time_col = "timestamp";
    std::string price_col = "price";
    std::string time_format = "auto";
    std::string gaps = "compact";
    std::string from, to;
    std::int64_t step = 60;
    std::string label;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input, "Price CSV with a header row")->required();
        cmd->add_option("--time-col", time_col, "Timestamp column name")->capture_default_str();
        cmd->add_option("--price-col", price_col, "Price column name")->capture_default_str();
        cmd->add_option("--time-format", time_format, "auto | iso8601 | epoch_s | epoch_ms")->capture_default_str();
        cmd->add_option("--gaps", gaps, "compact | ffill | error")->capture_default_str();
        cmd->add_option("--from", from, "First instant kept (ISO-8601)");
        cmd->add_option("--to", to, "Last instant kept; a bare date keeps that whole day");
        cmd->add_option("--step", step, "Sampling step in seconds")->capture_default_str();
        cmd->add_option("--label", label, "Series label (default: input file stem)");
    }
};

struct ConfigOptions {
    std::string config;
    ConfigSettings flags;
    std::string delta2_list;

    void attach(CLI::App* cmd, bool scan) {
        cmd->add_option("--config", config, "TOML file with test settings; flags override it");
        add(cmd, "--delta1", flags.delta1, "Detrending window, e.g. 1week, 1year, 10080");
        if (scan) {
            cmd->add_option("--delta2", delta2_list, "Comma-separated normalisation windows, e.g. 60min,10min")
                ->required();
        } else {
            add(cmd, "--delta2", flags.delta2, "Normalisation window, e.g. 60min");
        }
        add(cmd, "--smooth-hz", flags.smooth_hz, "Savitzky-Golay window in Hz");
        add(cmd, "--smooth-order", flags.smooth_order, "Savitzky-Golay polynomial order");
        add(cmd, "--profile", flags.profile, "segment (delta1 = 1week) | full (delta1 = 1year)");
        add(cmd, "--calendar", flags.calendar, "continuous | equity");
        add(cmd, "--threshold", flags.threshold, "Stationarity threshold on the distance");
        add(cmd, "--metric", flags.metric, "median_log_ratio | mean_pct_diff");
        add(cmd, "--ensemble-len", flags.ensemble_len, "Ensemble segment length in samples");
        add(cmd, "--returns", flags.returns, "lag1 | anchored");
        add(cmd, "--band-lo-hz", flags.band_lo_hz, "Lower edge of the comparison band");
        add(cmd, "--band-hi-hz", flags.band_hi_hz, "Upper edge of the comparison band");
    }

    template <typename T>
    static void add(CLI::App* cmd, const std::string& name, std::optional<T>& field, const std::string& help) {
        cmd->add_option_function<T>(name, [&field](const T& v) { field = v; }, help);
    }

    ConfigSettings settings() const {
        ConfigSettings file;
        if (!config.empty()) file = read_config_settings(fs::path(config));
        return flags.overlay(file);
    }
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

fs::path prepare_out_dir(const std::string& dir) {
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

TickSeries load_series(const InputOptions& o) {
    if (!fs::exists(o.input)) throw DataError("input file '" + o.input + "' does not exist");
    CsvSchema schema;
    schema.time_column = o.time_col;
    schema.price_column = o.price_col;
    schema.time_format = parse_time_format(o.time_format);
    const auto table = load_csv(o.input, schema);
    const std::string label = o.label.empty() ? fs::path(o.input).stem().string() : o.label;
    TickSeries series = to_tick_series(table, parse_gap_policy(o.gaps), o.step, label);
    if (!o.from.empty() || !o.to.empty()) {
        Instant start = o.from.empty() ? series.time_at(0) : parse_iso8601(o.from);
        Instant end = series.time_at(series.size() - 1);
        if (!o.to.empty()) {
            end = parse_iso8601(o.to);
            if (is_date_only(o.to)) end.seconds += 86399;
        }
        series = slice_by_dates(series, start, end);
    }
    series.validate();
    return series;
}

std::string sanitize(std::string_view s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
    return out;
}

void write_spectra(const fs::path& path, const Verdict& v) {
    auto out = open_out(path);
    const std::vector<Spectrum> both{v.comparison.psd_smoothed, v.comparison.ftac_smoothed};
    write_spectra_csv(out, both);
}

std::string summary_line(const Verdict& v) {
    return v.label + "  delta1=" + v.config.delta1.requested + " (" + std::to_string(v.config.delta1.samples) +
           ")  delta2=" + v.config.delta2.requested + " (" + std::to_string(v.config.delta2.samples) +
           ")  distance=" + format_double(v.distance) + "  threshold=" + format_double(v.threshold) + "  " +
           (v.stationary ? "stationary" : "non-stationary");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
    std::vector<std::string> args;
    std::ostream& out;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

void add_inputs(RunManifest& m, const InputOptions& in, const ConfigOptions* cfg) {
    m.add_input(in.input);
    if (cfg && !cfg->config.empty()) m.add_input(cfg->config);
}

void cmd_ingest(Context& ctx, const InputOptions& in, const std::string& out_dir) {
    const auto series = load_series(in);
    const auto dir = prepare_out_dir(out_dir);
    {
        auto f = open_out(dir / "series.csv");
        write_tick_csv(f, series);
    }
    RunManifest m("ingest", ctx.args);
    add_inputs(m, in, nullptr);
    m.set_extra("gap_policy", in.gaps);
    m.add_artifact(dir, "series.csv");
    m.write(dir, seconds_since(ctx.t0));
    ctx.out << "wrote " << series.size() << " samples to " << (dir / "series.csv").string() << '\n';
}

struct SynthOptions {
    std::string kind = "gaussian_iid";
    std::size_t n = 1 << 17;
    std::uint64_t seed = 0;
    GeneratorSpec spec;
    std::optional<std::size_t> switch_at;
    std::string start = "2020-01-01T00:00:00Z";

    void attach(CLI::App* cmd) {
        cmd->add_option("--kind", kind, "gaussian_iid | ar1 | random_walk | fbm | qgaussian | variance_switch")
            ->capture_default_str();
        cmd->add_option("--n", n, "Number of samples")->capture_default_str();
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
        cmd->add_option("--sigma", spec.sigma, "Noise scale (sigma before the switch)")->capture_default_str();
        cmd->add_option("--phi", spec.phi, "AR(1) coefficient")->capture_default_str();
        cmd->add_option("--hurst", spec.hurst, "fBm Hurst exponent")->capture_default_str();
        cmd->add_option("--q", spec.q, "q-Gaussian shape")->capture_default_str();
        cmd->add_option("--sigma-after", spec.sigma_after, "Noise scale after the switch")->capture_default_str();
        cmd->add_option_function<std::size_t>("--switch-at", [this](const std::size_t& v) { switch_at = v; },
                                              "Switch index (default n/2)");
        cmd->add_option("--base-level", spec.base_level, "Constant added to make prices positive")
            ->capture_default_str();
        cmd->add_option("--step", spec.step_seconds, "Sampling step in seconds")->capture_default_str();
        cmd->add_option("--start", start, "Timestamp of the first sample")->capture_default_str();
    }

    GeneratorSpec resolved() const {
        GeneratorSpec g = spec;
        g.kind = parse_generator_kind(kind);
        g.n = n;
        g.seed = seed;
        g.switch_at = switch_at;
        g.start = parse_iso8601(start);
        return g;
    }
};

void cmd_synth(Context& ctx, const SynthOptions& o, const std::string& out_dir) {
    const auto spec = o.resolved();
    const auto series = generate(spec);
    const auto dir = prepare_out_dir(out_dir);
    {
        auto f = open_out(dir / "series.csv");
        write_tick_csv(f, series);
    }
    RunManifest m("synth", ctx.args);
    m.set_extra("generator", std::string(to_string(spec.kind)));
    m.set_extra("seed", std::to_string(spec.seed));
    m.add_artifact(dir, "series.csv");
    m.write(dir, seconds_since(ctx.t0));
    ctx.out << "wrote " << series.size() << " samples (" << series.label << ") to " << (dir / "series.csv").string()
            << '\n';
}

void cmd_detrend(Context& ctx, const InputOptions& in, const ConfigOptions& co, const std::string& out_dir) {
    const auto series = load_series(in);
    const TestConfig cfg = resolve_config(co.settings(), series.step_seconds);
    if (cfg.delta1.samples > series.size()) {
        throw DataError("series of " + std::to_string(series.size()) + " samples is shorter than delta1 = " +
                        std::to_string(cfg.delta1.samples));
    }
    const auto trend = moving_average(series.values, cfg.delta1.samples);
    const auto detrended = detrend(series.values, trend);
    const auto dir = prepare_out_dir(out_dir);
    {
        auto f = open_out(dir / "detrended.csv");
        f << "timestamp,price,trend,detrended\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            f << format_iso8601(series.time_at(i)) << ',' << format_double(series.values[i]) << ','
              << format_double(trend.values[i]) << ',' << format_double(detrended.values[i]) << '\n';
        }
    }
    RunManifest m("detrend", ctx.args);
    add_inputs(m, in, &co);
    m.set_config(cfg);
    m.add_artifact(dir, "detrended.csv");
    m.write(dir, seconds_since(ctx.t0));
    ctx.out << "detrended " << series.size() << " samples over delta1 = " << cfg.delta1.requested << " ("
            << cfg.delta1.samples << " samples)\n";
}

void cmd_normalize(Context& ctx, const InputOptions& in, const ConfigOptions& co, const std::string& out_dir) {
    const auto series = load_series(in);
    const TestConfig cfg = resolve_config(co.settings(), series.step_seconds);
    const auto returns = prepare_returns(series, cfg);
    if (cfg.delta2.samples > returns.values.size()) {
        throw DataError("return series of " + std::to_string(returns.values.size()) +
                        " samples is shorter than delta2 = " + std::to_string(cfg.delta2.samples));
    }
    const auto sigma = rolling_std(returns.values, cfg.delta2.samples);
    const auto z = standard_score(returns, sigma);
    const auto dir = prepare_out_dir(out_dir);
    {
        auto f = open_out(dir / "normalized.csv");
        f << "timestamp,return,sigma,normalized\n";
        for (std::size_t i = 0; i < z.values.size(); ++i) {
            f << format_iso8601(series.time_at(i + 1)) << ',' << format_double(returns.values[i]) << ','
              << format_double(sigma.values[i]) << ',' << format_double(z.values[i]) << '\n';
        }
    }
    RunManifest m("normalize", ctx.args);
    add_inputs(m, in, &co);
    m.set_config(cfg);
    m.set_extra("sigma_floor_hits", std::to_string(z.floored.size()));
    m.add_artifact(dir, "normalized.csv");
    m.write(dir, seconds_since(ctx.t0));
    ctx.out << "normalised " << z.values.size() << " returns over delta2 = " << cfg.delta2.requested << " ("
            << cfg.delta2.samples << " samples); " << z.floored.size() << " samples hit the sigma floor\n";
}

void write_verdicts(Context& ctx, const std::string& command, const InputOptions& in, const ConfigOptions& co,
                    const TestConfig& cfg, const std::vector<Verdict>& verdicts,
                    const std::vector<std::string>& spectra_names, const fs::path& dir) {
    {
        auto f = open_out(dir / "verdicts.jsonl");
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            write_spectra(dir / spectra_names[i], verdicts[i]);
            f << verdict_json_line(verdicts[i], spectra_names[i]) << '\n';
        }
    }
    RunManifest m(command, ctx.args);
    add_inputs(m, in, &co);
    m.set_config(cfg);
    m.add_artifact(dir, "verdicts.jsonl");
    for (const auto& name : spectra_names) m.add_artifact(dir, name);
    m.write(dir, seconds_since(ctx.t0));
}

void cmd_test(Context& ctx, const InputOptions& in, const ConfigOptions& co, const std::string& out_dir) {
    const auto series = load_series(in);
    const TestConfig cfg = resolve_config(co.settings(), series.step_seconds);
    const Verdict v = test_stationarity(series, cfg);
    const auto dir = prepare_out_dir(out_dir);
    write_verdicts(ctx, "test", in, co, cfg, {v}, {"spectra.csv"}, dir);
    ctx.out << summary_line(v) << '\n';
}

void cmd_scan(Context& ctx, const InputOptions& in, const ConfigOptions& co, const std::string& out_dir) {
    const auto series = load_series(in);
    const TestConfig cfg = resolve_config(co.settings(), series.step_seconds);
    const Calendar calendar = resolved_calendar(co.settings());
    std::vector<WindowLen> windows;
    std::stringstream list(co.delta2_list);
    for (std::string item; std::getline(list, item, ',');) {
        const auto b = item.find_first_not_of(' '), e = item.find_last_not_of(' ');
        if (b == std::string::npos) throw UsageError("--delta2: empty entry in window list");
        try {
            windows.push_back(parse_window(item.substr(b, e - b + 1), series.step_seconds, calendar));
        } catch (const UsageError& err) {
            throw UsageError(std::string("--delta2: ") + err.what());
        }
    }
    const auto verdicts = scan_windows(series, cfg, windows);
    std::vector<std::string> names;
    std::set<std::string> used;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        std::string name = "spectra-" + sanitize(windows[i].requested) + ".csv";
        if (!used.insert(name).second) name = "spectra-" + std::to_string(i) + "-" + sanitize(windows[i].requested) + ".csv";
        used.insert(name);
        names.push_back(name);
    }
    const auto dir = prepare_out_dir(out_dir);
    write_verdicts(ctx, "scan", in, co, cfg, verdicts, names, dir);
    const Verdict* best = nullptr;
    for (const auto& v : verdicts) {
        ctx.out << summary_line(v) << '\n';
        if (v.stationary && (!best || v.config.delta2.samples > best->config.delta2.samples)) best = &v;
    }
    ctx.out << "largest stationary delta2: "
            << (best ? best->config.delta2.requested + " (" + std::to_string(best->config.delta2.samples) + " samples)"
                     : std::string("none"))
            << '\n';
}

void cmd_report(Context& ctx, const std::string& from, const std::string& out_dir) {
    const fs::path src(from);
    const auto dir = prepare_out_dir(out_dir.empty() ? from : out_dir);
    const auto written = render_reports(src, dir);
    RunManifest m("report", ctx.args);
    m.add_input(src / "verdicts.jsonl");
    for (const auto& name : written) m.add_artifact(dir, name);
    // A report written into its source directory would otherwise replace the
    // manifest of the run that produced the spectra.
    if (fs::equivalent(src, dir)) {
        nlohmann::ordered_json j;
        j["command"] = "report";
        j["svg"] = written;
        auto f = open_out(dir / "report.json");
        f << j.dump(2) << '\n';
    } else {
        m.write(dir, seconds_since(ctx.t0));
    }
    for (const auto& name : written) ctx.out << "wrote " << (dir / name).string() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wiener-Khinchin stationarity test for intraday price series", "wkstat"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    InputOptions in;
    ConfigOptions co;
    SynthOptions so;
    std::string out_dir = "out";
    std::string report_from, report_out;

    auto* ingest = app.add_subcommand("ingest", "Load a price CSV and write the cleaned series");
    in.attach(ingest);
    ingest->add_option("--out", out_dir, "Output directory")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic price series");
    so.attach(synth);
    synth->add_option("--out", out_dir, "Output directory")->capture_default_str();

    CLI::App* pipeline[4] = {
        app.add_subcommand("detrend", "Remove the moving-average trend"),
        app.add_subcommand("normalize", "Detrend, difference and standard-score the series"),
        app.add_subcommand("test", "Run the stationarity test"),
        app.add_subcommand("scan", "Run the test for several normalisation windows"),
    };
    for (auto* cmd : pipeline) {
        in.attach(cmd);
        co.attach(cmd, cmd->get_name() == "scan");
        cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    }

    auto* report = app.add_subcommand("report", "Render SVG plots from test or scan output");
    report->add_option("--from", report_from, "Directory holding verdicts.jsonl")->required();
    report->add_option("--out", report_out, "Output directory (default: the --from directory)");

    std::vector<std::string> argv_store{"wkstat"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        // Help and --version exit 0; every other parse failure is a usage error.
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    Context ctx{args, out};
    try {
        if (*ingest) cmd_ingest(ctx, in, out_dir);
        else if (*synth) cmd_synth(ctx, so, out_dir);
        else if (*pipeline[0]) cmd_detrend(ctx, in, co, out_dir);
        else if (*pipeline[1]) cmd_normalize(ctx, in, co, out_dir);
        else if (*pipeline[2]) cmd_test(ctx, in, co, out_dir);
        else if (*pipeline[3]) cmd_scan(ctx, in, co, out_dir);
        else if (*report) cmd_report(ctx, report_from, report_out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace wkstat
