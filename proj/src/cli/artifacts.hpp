#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emi::cli {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

// Writes through "<path>.tmp" and renames into place.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body);

// Throws DataError naming the command that produces the artifact.
void require_artifact(const fs::path& path, std::string_view producer);

// Directory for shipped data files: $EMI_DATA_DIR, else the build-time default.
fs::path data_dir();

// Inputs read and outputs written by one command, plus the resolved config.
class Run {
public:
    Run(std::string command, fs::path out_dir, std::string resolved_config);

    const fs::path& out_dir() const { return out_dir_; }
    fs::path output_path(std::string_view name) const { return out_dir_ / name; }

    void input(const fs::path& path) { inputs_.push_back(path); }
    // Writes an output atomically and records it for the manifest.
    void output(std::string_view name, const std::function<void(std::ostream&)>& body);
    // Records a file written by other means.
    void record_output(const fs::path& path) { outputs_.push_back(path); }
    void note(std::string key, std::string value) { notes_.emplace_back(std::move(key), std::move(value)); }

    // Writes "<command>.config" and "<command>.manifest.json" into out_dir.
    void finish();

private:
    std::string command_;
    fs::path out_dir_;
    std::string config_;
    std::vector<fs::path> inputs_;
    std::vector<fs::path> outputs_;
    std::vector<std::pair<std::string, std::string>> notes_;
};

}  // namespace emi::cli
