#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "artifacts.hpp"

namespace emi::cli {

struct Console {
    std::ostream& out;
    std::ostream& err;
};

struct PreprocessConfig {
    fs::path input;
    fs::path out_dir = ".";
    fs::path common_words;  // empty: <data>/top100.txt
    double min_ratio = 0.05;
    std::size_t min_tokens = 11;
    std::size_t chunk_target = 150;
    std::size_t chunk_min = 50;
};

struct TrainConfig {
    fs::path chunks;  // empty: <out>/chunks.jsonl
    fs::path out_dir = ".";
    int dim = 300;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double alpha = 0.025;
    double subsample = 1e-5;
    std::uint64_t seed = 1;
    std::uint64_t min_count = 5;
    int threads = 1;
};

struct ScoreConfig {
    fs::path chunks;  // empty: <out>/chunks.jsonl
    fs::path model;   // empty: <out>/model.txt
    fs::path evidence, intuition, stopwords;  // empty: shipped data files
    fs::path out_dir = ".";
    std::size_t bin_width = 25;
    std::size_t open_bin = 200;
};

struct AggregateConfig {
    fs::path scored;  // empty: <out>/scored.csv
    fs::path out_dir = ".";
    int n_boot = 10000;
    std::uint64_t seed = 1;
    bool emit_plot_data = false;
};

struct AnalyzeConfig {
    fs::path table;
    fs::path out_dir = ".";
    std::vector<std::string> families;  // empty: all available
    std::string interaction_policy = "vif";
    std::vector<std::string> overrides;  // family=policy
    std::vector<std::string> log_columns{"nlaw", "npatents"};
    bool standardize_productivity = true;
    int hac_bandwidth = -1;  // -1: automatic
    int n_boot = 10000;
    std::uint64_t seed = 1;
    double jb_alpha = 0.05;
    int max_lag = 5;
    int threads = 1;
    bool emit_plot_data = false;
};

struct ValidateConfig {
    fs::path labels;
    fs::path scored;  // empty: <out>/scored.csv, used when labels carry chunk_id only
    fs::path out_dir = ".";
};

struct TrendConfig {
    fs::path aggregates;  // empty: <out>/aggregates.csv
    fs::path out_dir = ".";
    bool emit_plot_data = false;
};

struct CrosscorrConfig {
    fs::path table;
    fs::path out_dir = ".";
    std::string x = "EMI";
    std::string y = "Pol";
    int max_lag = 5;
    std::vector<std::string> log_columns{"nlaw", "npatents"};
};

void cmd_preprocess(const PreprocessConfig& c, Run& run, Console io);
void cmd_train(const TrainConfig& c, Run& run, Console io);
void cmd_score(const ScoreConfig& c, Run& run, Console io);
void cmd_aggregate(const AggregateConfig& c, Run& run, Console io);
void cmd_analyze(const AnalyzeConfig& c, Run& run, Console io);
void cmd_validate(const ValidateConfig& c, Run& run, Console io);
void cmd_trend(const TrendConfig& c, Run& run, Console io);
void cmd_crosscorr(const CrosscorrConfig& c, Run& run, Console io);

// Decade bucket used by validate-auc: 1879, 1889, ...
int decade_of(int year);

}  // namespace emi::cli
