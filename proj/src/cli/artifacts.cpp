#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <json.hpp>
#include <memory>

#include "wkstat/cli.hpp"
#include "wkstat/error.hpp"

#ifndef WKSTAT_VERSION
#define WKSTAT_VERSION "0.0.0"
#endif

namespace wkstat {
namespace {

class Sha1 {
public:
    Sha1() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha1(), nullptr) != 1) {
            throw std::runtime_error("SHA-1 initialisation failed");
        }
    }
    void update(const void* data, std::size_t len) { EVP_DigestUpdate(ctx_.get(), data, len); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

void blob_header(Sha1& h, std::uintmax_t size) {
    const std::string header = "blob " + std::to_string(size);
    h.update(header.data(), header.size() + 1);  // includes the terminating NUL
}

nlohmann::ordered_json config_object(const TestConfig& cfg) {
    nlohmann::ordered_json j;
    j["delta1"] = {{"samples", cfg.delta1.samples}, {"requested", cfg.delta1.requested}};
    j["delta2"] = {{"samples", cfg.delta2.samples}, {"requested", cfg.delta2.requested}};
    j["ensemble_len"] = cfg.ensemble_len;
    j["smooth_hz"] = cfg.smooth_hz;
    j["smooth_order"] = cfg.smooth_order;
    if (cfg.band) {
        j["band"] = {cfg.band->lo_hz, cfg.band->hi_hz};
    } else {
        j["band"] = "default";
    }
    j["metric"] = std::string(to_string(cfg.metric));
    j["threshold"] = cfg.threshold;
    j["returns"] = std::string(to_string(cfg.returns));
    return j;
}

}  // namespace

std::string_view tool_version() { return WKSTAT_VERSION; }

std::string git_blob_sha1(std::string_view content) {
    Sha1 h;
    blob_header(h, content.size());
    h.update(content.data(), content.size());
    return h.hex();
}

std::string git_blob_sha1(const std::filesystem::path& file) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(file, ec);
    std::ifstream in(file, std::ios::binary);
    if (ec || !in) throw DataError("cannot read '" + file.string() + "'");
    Sha1 h;
    blob_header(h, size);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

std::string config_json(const TestConfig& cfg) { return config_object(cfg).dump(); }

RunManifest::RunManifest(std::string command, std::vector<std::string> args)
    : command_(std::move(command)), args_(std::move(args)) {}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs_.push_back({path.string(), git_blob_sha1(path), std::filesystem::file_size(path)});
}

void RunManifest::add_artifact(const std::filesystem::path& out_dir, const std::string& name) {
    const auto path = out_dir / name;
    artifacts_.push_back({name, git_blob_sha1(path), std::filesystem::file_size(path)});
}

void RunManifest::set_config(const TestConfig& cfg) { config_ = cfg; }

void RunManifest::set_extra(const std::string& key, const std::string& value) { extra_.emplace_back(key, value); }

void RunManifest::write(const std::filesystem::path& out_dir, double wall_clock_seconds) const {
    nlohmann::ordered_json j;
    j["tool"] = "wkstat";
    j["version"] = std::string(tool_version());
    j["command"] = command_;
    j["args"] = args_;
    j["output_dir"] = out_dir.string();
    auto entries = [](const std::vector<Entry>& list) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& e : list) arr.push_back({{"path", e.path}, {"git_sha1", e.sha1}, {"bytes", e.bytes}});
        return arr;
    };
    j["inputs"] = entries(inputs_);
    if (config_) j["config"] = config_object(*config_);
    for (const auto& [k, v] : extra_) j[k] = v;
    j["artifacts"] = entries(artifacts_);
    j["wall_clock_seconds"] = wall_clock_seconds;
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write manifest in '" + out_dir.string() + "'");
    out << j.dump(2) << '\n';
}

}  // namespace wkstat
