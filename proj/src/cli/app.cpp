#include "emi/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "commands.hpp"
#include "emi/errors.hpp"

namespace emi::cli {

namespace {

// Flat key=value config files are read with CLI11's INI reader and turned into
// "--key=value" arguments placed before the command-line flags, so flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::optional<std::string> config;
    std::size_t insert_at = args.empty() ? 0 : 1;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config = args[++i];
            continue;
        }
        if (args[i].starts_with("--config=")) {
            config = args[i].substr(9);
            continue;
        }
        out.push_back(args[i]);
    }
    if (!config) return out;
    std::ifstream in(*config);
    if (!in) throw CLI::FileError::Missing(*config);
    std::vector<std::string> from_file;
    for (const auto& item : CLI::ConfigINI().from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty()) throw CLI::ConversionError(fmt::format("config '{}' must be flat key=value", *config));
        // An empty value is an unset path option; CLI11 would otherwise take the next argument for it.
        for (const auto& value : item.inputs)
            if (!value.empty()) from_file.push_back(fmt::format("--{}={}", item.name, value));
    }
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(std::min(insert_at, out.size())), from_file.begin(),
               from_file.end());
    return out;
}

std::string resolved_config(const CLI::App* sub) {
    std::string text = sub->config_to_str(true, false);
    return text;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evidence-minus-intuition scoring of speeches and session time-series analysis", "emi"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", EMI_VERSION);
    app.footer("Every command accepts --config FILE with flat key=value lines; flags override the file.\n"
               "Data files (dictionaries, word lists) are read from $EMI_DATA_DIR when set.");

    PreprocessConfig pre;
    auto* s_pre = app.add_subcommand("preprocess", "Filter raw speeches and split them into chunks");
    s_pre->add_option("--input", pre.input, "JSON-lines speech corpus")->required();
    s_pre->add_option("--out-dir", pre.out_dir, "Output directory");
    s_pre->add_option("--common-words", pre.common_words, "Common-word list (default: data top100.txt)");
    s_pre->add_option("--min-ratio", pre.min_ratio, "Minimum common-word ratio")->check(CLI::Range(0.0, 1.0));
    s_pre->add_option("--min-tokens", pre.min_tokens, "Minimum speech length in tokens");
    s_pre->add_option("--chunk-target", pre.chunk_target, "Target chunk size")->check(CLI::PositiveNumber);
    s_pre->add_option("--chunk-min", pre.chunk_min, "Minimum chunk size")->check(CLI::PositiveNumber);

    TrainConfig tr;
    auto* s_tr = app.add_subcommand("train", "Train skip-gram word embeddings on the chunks");
    s_tr->add_option("--chunks", tr.chunks, "Chunk file (default: <out-dir>/chunks.jsonl)");
    s_tr->add_option("--out-dir", tr.out_dir, "Output directory");
    s_tr->add_option("--dim", tr.dim)->check(CLI::PositiveNumber);
    s_tr->add_option("--window", tr.window)->check(CLI::PositiveNumber);
    s_tr->add_option("--negatives", tr.negatives)->check(CLI::NonNegativeNumber);
    s_tr->add_option("--epochs", tr.epochs)->check(CLI::PositiveNumber);
    s_tr->add_option("--alpha", tr.alpha, "Initial learning rate")->check(CLI::PositiveNumber);
    s_tr->add_option("--subsample", tr.subsample, "Frequent-word subsampling threshold (0 disables)");
    s_tr->add_option("--seed", tr.seed);
    s_tr->add_option("--min-count", tr.min_count);
    s_tr->add_option("--threads", tr.threads, "Worker threads; 1 is deterministic")->check(CLI::PositiveNumber);

    ScoreConfig sc;
    auto* s_sc = app.add_subcommand("score", "Score chunks against the evidence and intuition constructs");
    s_sc->add_option("--chunks", sc.chunks, "Chunk file (default: <out-dir>/chunks.jsonl)");
    s_sc->add_option("--model", sc.model, "Embedding model (default: <out-dir>/model.txt)");
    s_sc->add_option("--evidence", sc.evidence, "Evidence dictionary (default: data evidence.txt)");
    s_sc->add_option("--intuition", sc.intuition, "Intuition dictionary (default: data intuition.txt)");
    s_sc->add_option("--stopwords", sc.stopwords, "Stopword list (default: data stopwords.txt)");
    s_sc->add_option("--out-dir", sc.out_dir, "Output directory");
    s_sc->add_option("--bin-width", sc.bin_width, "Length-bin width in tokens")->check(CLI::PositiveNumber);
    s_sc->add_option("--open-bin", sc.open_bin, "Lengths from here on share the last bin");

    AggregateConfig ag;
    auto* s_ag = app.add_subcommand("aggregate", "Session and party means of EMI with bootstrap intervals");
    s_ag->add_option("--scored", ag.scored, "Scored chunks (default: <out-dir>/scored.csv)");
    s_ag->add_option("--out-dir", ag.out_dir, "Output directory");
    s_ag->add_option("--n-boot", ag.n_boot)->check(CLI::PositiveNumber);
    s_ag->add_option("--seed", ag.seed);
    s_ag->add_flag("--emit-plot-data", ag.emit_plot_data, "Also write tidy CSVs for plotting");

    AnalyzeConfig an;
    auto* s_an = app.add_subcommand("analyze", "Fit the regression model suite on a session-series table");
    s_an->add_option("--table", an.table, "Session-series CSV with a 'session' column")->required();
    s_an->add_option("--out-dir", an.out_dir, "Output directory");
    s_an->add_option("--families", an.families, "Model families to fit (default: all available)")->delimiter(',');
    s_an->add_option("--interaction-policy", an.interaction_policy, "vif, always or never")
        ->check(CLI::IsMember({"vif", "always", "never"}));
    s_an->add_option("--override", an.overrides, "Per-family policy, family=policy")->delimiter(',');
    s_an->add_option("--log-columns", an.log_columns, "Columns log-transformed at ingestion")->delimiter(',');
    s_an->add_option("--standardize-productivity", an.standardize_productivity,
                     "z-standardize the productivity-model columns");
    s_an->add_option("--hac-bandwidth", an.hac_bandwidth, "Newey-West bandwidth (-1: automatic)");
    s_an->add_option("--n-boot", an.n_boot)->check(CLI::PositiveNumber);
    s_an->add_option("--seed", an.seed);
    s_an->add_option("--jb-alpha", an.jb_alpha, "Bootstrap the EMI coefficient when JB p is below this");
    s_an->add_option("--max-lag", an.max_lag, "Largest lag for cross-correlation plot data");
    s_an->add_option("--threads", an.threads)->check(CLI::PositiveNumber);
    s_an->add_flag("--emit-plot-data", an.emit_plot_data, "Also write tidy CSVs for plotting");

    ValidateConfig va;
    auto* s_va = app.add_subcommand("validate-auc", "ROC-AUC of EMI against human labels, overall and per decade");
    s_va->add_option("--labels", va.labels, "CSV with label (0/1) and emi or chunk_id [, decade | year]")->required();
    s_va->add_option("--scored", va.scored, "Scored chunks for chunk_id joins (default: <out-dir>/scored.csv)");
    s_va->add_option("--out-dir", va.out_dir, "Output directory");

    TrendConfig tn;
    auto* s_tn = app.add_subcommand("trend", "Linear trend of session EMI after its peak");
    s_tn->add_option("--aggregates", tn.aggregates, "Session aggregates (default: <out-dir>/aggregates.csv)");
    s_tn->add_option("--out-dir", tn.out_dir, "Output directory");
    s_tn->add_flag("--emit-plot-data", tn.emit_plot_data, "Also write tidy CSVs for plotting");

    CrosscorrConfig cc;
    auto* s_cc = app.add_subcommand("crosscorr", "Lagged cross-correlation of two table columns");
    s_cc->add_option("--table", cc.table, "Session-series CSV with a 'session' column")->required();
    s_cc->add_option("--out-dir", cc.out_dir, "Output directory");
    s_cc->add_option("--x", cc.x);
    s_cc->add_option("--y", cc.y);
    s_cc->add_option("--max-lag", cc.max_lag)->check(CLI::NonNegativeNumber);
    s_cc->add_option("--log-columns", cc.log_columns, "Columns log-transformed at ingestion")->delimiter(',');

    for (auto* sub : app.get_subcommands({})) sub->add_option("--config", "Flat key=value config file");

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Success : UsageError;
    }

    const Console io{out, err};
    try {
        auto* sub = app.get_subcommands().front();
        auto go = [&](const auto& config, auto command) {
            Run r(sub->get_name(), config.out_dir, resolved_config(sub));
            command(config, r, io);
            r.finish();
        };
        const std::string name = sub->get_name();
        if (name == "preprocess") go(pre, cmd_preprocess);
        else if (name == "train") go(tr, cmd_train);
        else if (name == "score") go(sc, cmd_score);
        else if (name == "aggregate") go(ag, cmd_aggregate);
        else if (name == "analyze") go(an, cmd_analyze);
        else if (name == "validate-auc") go(va, cmd_validate);
        else if (name == "trend") go(tn, cmd_trend);
        else if (name == "crosscorr") go(cc, cmd_crosscorr);
    } catch (const DataError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return DataFailure;
    } catch (const NumericalError& e) {
        fmt::print(err, "numerical error: {}\n", e.what());
        return NumericalFailure;
    } catch (const std::invalid_argument& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return UsageError;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return DataFailure;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return NumericalFailure;
    }
    return Success;
}

}  // namespace emi::cli
