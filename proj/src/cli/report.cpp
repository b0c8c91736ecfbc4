#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "wkstat/cli.hpp"
#include "wkstat/error.hpp"

namespace wkstat {
namespace {

constexpr double kWidth = 760, kHeight = 520;
constexpr double kLeft = 84, kRight = 24, kTop = 64, kBottom = 60;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return !(lo <= hi); }
};

// Whole decades covering the range, at least one decade wide.
std::pair<int, int> decades(const Range& r) {
    int lo = static_cast<int>(std::floor(std::log10(r.lo)));
    int hi = static_cast<int>(std::ceil(std::log10(r.hi)));
    if (hi <= lo) hi = lo + 1;
    return {lo, hi};
}

struct Axes {
    int xlo, xhi, ylo, yhi;
    double px(double f) const {
        return kLeft + (std::log10(f) - xlo) / (xhi - xlo) * (kWidth - kLeft - kRight);
    }
    double py(double v) const {
        return kHeight - kBottom - (std::log10(v) - ylo) / (yhi - ylo) * (kHeight - kTop - kBottom);
    }
};

std::string polyline(const Spectrum& s, const Axes& ax, const char* colour, const char* dash) {
    std::string pts;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s.frequencies[k] > 0.0) || !(s.values[k] > 0.0)) continue;
        if (!pts.empty()) pts += ' ';
        pts += num(ax.px(s.frequencies[k])) + "," + num(ax.py(s.values[k]));
    }
    std::string out = "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.2\"";
    if (*dash) out += " stroke-dasharray=\"" + std::string(dash) + "\"";
    return out + " points=\"" + pts + "\"/>\n";
}

std::string label_for(int exponent) { return "1e" + std::to_string(exponent); }

}  // namespace

std::string render_spectra_svg(const Spectrum& psd, const Spectrum& ftac, const PlotAnnotation& note) {
    Range fx, vy;
    for (const Spectrum* s : {&psd, &ftac}) {
        for (std::size_t k = 0; k < s->size(); ++k) {
            if (s->frequencies[k] > 0.0 && s->values[k] > 0.0) {
                fx.add(s->frequencies[k]);
                vy.add(s->values[k]);
            }
        }
    }
    if (fx.empty()) throw DataError("nothing to plot: no positive frequency with a positive value");
    const auto [xlo, xhi] = decades(fx);
    const auto [ylo, yhi] = decades(vy);
    const Axes ax{xlo, xhi, ylo, yhi};
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (note.band) {
        const double bl = std::max(note.band->lo_hz, std::pow(10.0, xlo));
        const double bh = std::min(note.band->hi_hz, std::pow(10.0, xhi));
        if (bl > 0.0 && bh > bl) {
            svg << "<rect x=\"" << num(ax.px(bl)) << "\" y=\"" << num(y0) << "\" width=\""
                << num(ax.px(bh) - ax.px(bl)) << "\" height=\"" << num(y1 - y0) << "\" fill=\"#f2f2f2\"/>\n";
        }
    }
    for (int e = xlo; e <= xhi; ++e) {
        const double x = ax.px(std::pow(10.0, e));
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\"" << num(y1)
            << "\" stroke=\"#d0d0d0\"/>\n";
        svg << "<text x=\"" << num(x) << "\" y=\"" << num(y1 + 18) << "\" text-anchor=\"middle\">" << label_for(e)
            << "</text>\n";
    }
    for (int e = ylo; e <= yhi; ++e) {
        const double y = ax.py(std::pow(10.0, e));
        svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y)
            << "\" stroke=\"#d0d0d0\"/>\n";
        svg << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << label_for(e)
            << "</text>\n";
    }
    svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
        << num(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << polyline(psd, ax, "#1f5fbf", "");
    svg << polyline(ftac, ax, "#c8322b", "5,3");

    svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 16)
        << "\" text-anchor=\"middle\">frequency (Hz)</text>\n";
    svg << "<text transform=\"translate(18," << num((y0 + y1) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">spectral density</text>\n";
    svg << "<text x=\"" << num(x0) << "\" y=\"22\" font-size=\"15\">" << escape(note.title) << "</text>\n";
    if (!note.subtitle.empty()) {
        svg << "<text x=\"" << num(x0) << "\" y=\"42\">" << escape(note.subtitle) << "</text>\n";
    }

    const double lx = x0 + 12, ly = y0 + 18;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 26) << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"#1f5fbf\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(ly) << "\">PSD</text>\n";
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly + 14) << "\" x2=\"" << num(lx + 26) << "\" y2=\""
        << num(ly + 14) << "\" stroke=\"#c8322b\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";
    svg << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(ly + 18) << "\">FT of autocorrelation</text>\n";

    if (note.distance) {
        std::string line = "distance = " + short_num(*note.distance);
        if (note.threshold) line += ", threshold = " + short_num(*note.threshold);
        if (note.stationary) line += *note.stationary ? ": stationary" : ": non-stationary";
        svg << "<text x=\"" << num(x0 + 8) << "\" y=\"" << num(y1 - 10) << "\">" << escape(line) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::string> render_reports(const std::filesystem::path& dir, const std::filesystem::path& out_dir) {
    const auto verdicts_path = dir / "verdicts.jsonl";
    std::ifstream in(verdicts_path);
    if (!in) throw DataError("no verdicts.jsonl in '" + dir.string() + "'");
    std::vector<std::string> written;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json v;
        try {
            v = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("verdicts.jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!v.contains("spectra_file")) {
            throw DataError("verdicts.jsonl line " + std::to_string(line_no) + " names no spectra file");
        }
        const std::string spectra_name = v["spectra_file"].get<std::string>();
        std::ifstream sin(dir / spectra_name);
        if (!sin) throw DataError("cannot read spectra file '" + (dir / spectra_name).string() + "'");
        const auto spectra = read_spectra_csv(sin);
        const Spectrum* psd = nullptr;
        const Spectrum* ftac = nullptr;
        for (const auto& s : spectra) {
            if (s.kind == SpectrumKind::Psd) psd = &s;
            if (s.kind == SpectrumKind::FtAcf) ftac = &s;
        }
        if (!psd || !ftac) throw DataError(spectra_name + " must hold one psd and one ft_acf spectrum");

        PlotAnnotation note;
        note.title = v.value("label", std::string("series"));
        note.subtitle = "\xCE\x94\xE2\x82\x81 = " + v.value("delta1_requested", std::string()) + " (" +
                        std::to_string(v.value("delta1", 0)) + " samples), \xCE\x94\xE2\x82\x82 = " +
                        v.value("delta2_requested", std::string()) + " (" + std::to_string(v.value("delta2", 0)) +
                        " samples), metric " + v.value("metric", std::string());
        if (v.contains("distance")) note.distance = v["distance"].get<double>();
        if (v.contains("threshold")) note.threshold = v["threshold"].get<double>();
        if (v.contains("stationary")) note.stationary = v["stationary"].get<bool>();
        if (v.contains("band") && v["band"].size() == 2) note.band = Band{v["band"][0], v["band"][1]};

        const std::string name = std::filesystem::path(spectra_name).stem().string() + ".svg";
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out) throw DataError("cannot write '" + (out_dir / name).string() + "'");
        out << render_spectra_svg(*psd, *ftac, note);
        written.push_back(name);
    }
    if (written.empty()) throw DataError("verdicts.jsonl in '" + dir.string() + "' is empty");
    return written;
}

}  // namespace wkstat
