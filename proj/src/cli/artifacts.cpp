#include "artifacts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "emi/errors.hpp"
#include "emi/stats/critical_values.hpp"

#ifndef EMI_DEFAULT_DATA_DIR
#define EMI_DEFAULT_DATA_DIR "data"
#endif
#ifndef EMI_VERSION
#define EMI_VERSION "0.0.0"
#endif

namespace emi::cli {

namespace {

std::string hex(const unsigned char* bytes, unsigned int n) {
    std::string out;
    for (unsigned int i = 0; i < n; ++i) out += fmt::format("{:02x}", bytes[i]);
    return out;
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr); }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
    std::string hex_digest() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int n = 0;
        EVP_DigestFinal_ex(ctx_, md, &n);
        return hex(md, n);
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex_digest();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot read '{}'", path.string()));
    Sha256 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.hex_digest();
}

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError(fmt::format("cannot write '{}'", tmp.string()));
        body(out);
        out.flush();
        if (!out) throw DataError(fmt::format("write to '{}' failed", tmp.string()));
    }
    fs::rename(tmp, path);
}

void require_artifact(const fs::path& path, std::string_view producer) {
    if (!fs::exists(path))
        throw DataError(fmt::format("'{}' not found; produce it with `emi {}` first", path.string(), producer));
}

fs::path data_dir() {
    if (const char* env = std::getenv("EMI_DATA_DIR"); env && *env) return env;
    return EMI_DEFAULT_DATA_DIR;
}

Run::Run(std::string command, fs::path out_dir, std::string resolved_config)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), config_(std::move(resolved_config)) {
    fs::create_directories(out_dir_);
}

void Run::output(std::string_view name, const std::function<void(std::ostream&)>& body) {
    const auto path = output_path(name);
    write_atomic(path, body);
    outputs_.push_back(path);
}

void Run::finish() {
    const auto config_path = output_path(command_ + ".config");
    write_atomic(config_path, [&](std::ostream& o) { o << config_; });

    nlohmann::ordered_json m;
    m["command"] = command_;
    m["version"] = EMI_VERSION;
    m["critical_values_version"] = stats::critical_values_version;
    m["config"] = config_path.string();
    m["config_sha256"] = sha256_hex(config_);
    auto files = [](const std::vector<fs::path>& paths) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : paths) arr.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
        return arr;
    };
    m["inputs"] = files(inputs_);
    m["outputs"] = files(outputs_);
    auto notes = nlohmann::ordered_json::object();
    for (const auto& [k, v] : notes_) notes[k] = v;
    m["notes"] = notes;
    write_atomic(output_path(command_ + ".manifest.json"), [&](std::ostream& o) { o << m.dump(2) << "\n"; });
}

}  // namespace emi::cli
