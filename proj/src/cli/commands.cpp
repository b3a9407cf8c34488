#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "emi/corpus.hpp"
#include "emi/corpus_io.hpp"
#include "emi/csv.hpp"
#include "emi/embeddings.hpp"
#include "emi/errors.hpp"
#include "emi/scoring.hpp"
#include "emi/stats/bootstrap.hpp"
#include "emi/stats/correlation.hpp"
#include "emi/stats/diagnostics.hpp"
#include "emi/stats/model_suite.hpp"
#include "emi/stats/rank.hpp"
#include "emi/stats/regression.hpp"
#include "emi/stats/table.hpp"

namespace emi::cli {

namespace {

fs::path or_default(const fs::path& given, const fs::path& fallback) { return given.empty() ? fallback : given; }

// Missing values are written as empty fields.
std::string real(double v) { return std::isnan(v) ? std::string() : fmt::format("{}", v); }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : std::string(sep)) + p;
    return out;
}

}  // namespace

int decade_of(int year) { return 1879 + 10 * static_cast<int>(std::floor((year - 1879) / 10.0)); }

void cmd_preprocess(const PreprocessConfig& c, Run& run, Console io) {
    require_artifact(c.input, "preprocess --input <corpus.jsonl> (the raw speech corpus)");
    const auto common_path = or_default(c.common_words, data_dir() / "top100.txt");
    run.input(c.input);
    run.input(common_path);
    const auto common = corpus::load_word_set(common_path);

    const auto read = corpus::read_speeches(c.input);
    run.output("malformed.csv", [&](std::ostream& o) {
        fmt::print(o, "line,message\n");
        for (const auto& m : read.malformed) fmt::print(o, "{},{}\n", m.line_number, csv::escape(m.message));
    });
    for (const auto& m : read.malformed) fmt::print(io.err, "{}:{}: {}\n", c.input.string(), m.line_number, m.message);
    const double allowed = std::max(1.0, 0.01 * static_cast<double>(read.n_lines));
    if (static_cast<double>(read.malformed.size()) > allowed)
        throw DataError(fmt::format("{} of {} corpus lines are malformed (limit {}); see malformed.csv",
                                    read.malformed.size(), read.n_lines, static_cast<std::size_t>(allowed)));

    corpus::FilterOptions fo;
    fo.threshold = c.min_ratio;
    fo.min_tokens = c.min_tokens;
    const auto filtered = corpus::filter_speeches(read.records, common, fo);

    corpus::ChunkOptions co;
    co.target = c.chunk_target;
    co.min_size = c.chunk_min;
    std::size_t n_chunks = 0;
    run.output("chunks.jsonl", [&](std::ostream& o) {
        for (const auto& rec : filtered.kept) {
            for (const auto& chunk : corpus::chunk_speech(rec, corpus::tokenize(rec), co)) {
                o << corpus::chunk_to_json(chunk) << '\n';
                ++n_chunks;
            }
        }
    });
    run.output("rejections.csv", [&](std::ostream& o) {
        fmt::print(o, "speech_id,reason\n");
        for (const auto& r : filtered.rejected) fmt::print(o, "{},{}\n", csv::escape(r.speech_id), to_string(r.reason));
    });
    std::map<std::string_view, std::size_t> by_reason;
    for (const auto& r : filtered.rejected) ++by_reason[to_string(r.reason)];
    fmt::print(io.out, "speeches={} malformed={} kept={} rejected={} chunks={}\n", read.records.size(),
               read.malformed.size(), filtered.kept.size(), filtered.rejected.size(), n_chunks);
    for (const auto& [reason, n] : by_reason) fmt::print(io.out, "  {}={}\n", reason, n);
}

void cmd_train(const TrainConfig& c, Run& run, Console io) {
    const auto chunks_path = or_default(c.chunks, run.output_path("chunks.jsonl"));
    require_artifact(chunks_path, "preprocess");
    run.input(chunks_path);
    const auto chunks = corpus::read_chunks(chunks_path);
    const auto vocab = embeddings::build_vocab(chunks, c.min_count);

    embeddings::TrainingParams p;
    p.dim = c.dim;
    p.window = c.window;
    p.negatives = c.negatives;
    p.epochs = c.epochs;
    p.alpha0 = c.alpha;
    p.subsample = c.subsample;
    p.seed = c.seed;
    p.min_count = c.min_count;
    p.threads = c.threads;
    const auto model = embeddings::train_sgns(chunks, vocab, p, &io.err);

    // save_model writes sidecars next to its target, so stage under a temporary name.
    const auto final_path = run.output_path("model.txt");
    auto staged = final_path;
    staged += ".staging";
    embeddings::save_model(model, staged, true);
    for (const char* suffix : {"", ".params", ".bin"}) {
        auto from = staged, to = final_path;
        from += suffix;
        to += suffix;
        fs::rename(from, to);
        run.record_output(to);
    }
    fmt::print(io.out, "chunks={} vocab={} dim={}\n", chunks.size(), vocab.size(), model.dim());
}

void cmd_score(const ScoreConfig& c, Run& run, Console io) {
    const auto chunks_path = or_default(c.chunks, run.output_path("chunks.jsonl"));
    const auto model_path = or_default(c.model, run.output_path("model.txt"));
    const auto evidence_path = or_default(c.evidence, data_dir() / "evidence.txt");
    const auto intuition_path = or_default(c.intuition, data_dir() / "intuition.txt");
    const auto stop_path = or_default(c.stopwords, data_dir() / "stopwords.txt");
    require_artifact(chunks_path, "preprocess");
    require_artifact(model_path, "train");
    for (const auto& p : {chunks_path, model_path, evidence_path, intuition_path, stop_path}) run.input(p);

    const auto model = embeddings::load_model(model_path);
    const auto chunks = corpus::read_chunks(chunks_path);
    const auto stopwords = corpus::load_word_set(stop_path);
    const auto e_dict = scoring::ConstructDictionary::load(evidence_path, "evidence");
    const auto i_dict = scoring::ConstructDictionary::load(intuition_path, "intuition");
    const auto cv_e = scoring::construct_vector(e_dict, model);
    const auto cv_i = scoring::construct_vector(i_dict, model);

    auto result = scoring::score_chunks(chunks, model, cv_e, cv_i, stopwords);
    scoring::LengthBins bins;
    bins.width = c.bin_width;
    bins.open_from = c.open_bin;
    auto scored = scoring::z_transform(scoring::length_adjust(std::move(result.chunks), bins));

    run.output("scored.csv", [&](std::ostream& o) { scoring::write_scored_csv(o, scored); });
    run.output("constructs.csv", [&](std::ostream& o) {
        fmt::print(o, "construct,n_entries,n_resolved,unresolved\n");
        for (const auto* pair : {&e_dict, &i_dict}) {
            const auto& cv = pair == &e_dict ? cv_e : cv_i;
            fmt::print(o, "{},{},{},{}\n", cv.name, pair->entries.size(), cv.n_resolved,
                       csv::escape(join(cv.unresolved, ";")));
        }
    });
    if (result.n_dropped > 0)
        fmt::print(io.err, "dropped {} chunk(s) without content words\n", result.n_dropped);
    fmt::print(io.out, "scored={} dropped={} evidence_resolved={}/{} intuition_resolved={}/{}\n", scored.size(),
               result.n_dropped, cv_e.n_resolved, e_dict.entries.size(), cv_i.n_resolved, i_dict.entries.size());
}

void cmd_aggregate(const AggregateConfig& c, Run& run, Console io) {
    const auto scored_path = or_default(c.scored, run.output_path("scored.csv"));
    require_artifact(scored_path, "score");
    run.input(scored_path);
    const auto scored = scoring::read_scored_csv(scored_path);
    if (scored.empty()) throw DataError(fmt::format("'{}' has no scored chunks", scored_path.string()));

    scoring::BootstrapOptions bo;
    bo.n_boot = c.n_boot;
    bo.seed = c.seed;
    const auto sessions = scoring::aggregate(scored, {true, false, false}, bo);
    const auto by_party = scoring::aggregate(scored, {true, true, false}, bo);
    run.output("aggregates.csv", [&](std::ostream& o) { scoring::write_aggregates_csv(o, sessions); });
    run.output("aggregates_party.csv", [&](std::ostream& o) { scoring::write_aggregates_csv(o, by_party); });

    // Party difference per session (and pooled) with a rank-sum test.
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> groups;
    std::pair<std::vector<double>, std::vector<double>> pooled;
    for (const auto& s : scored) {
        if (s.party == corpus::Party::Other) continue;
        auto& g = groups[s.session];
        (s.party == corpus::Party::D ? g.first : g.second).push_back(s.emi);
        (s.party == corpus::Party::D ? pooled.first : pooled.second).push_back(s.emi);
    }
    run.output("party_tests.csv", [&](std::ostream& o) {
        fmt::print(o, "session,n_d,n_r,median_d,median_r,u,p,exact\n");
        auto row = [&](std::string_view label, const auto& g) {
            if (g.first.empty() || g.second.empty()) return;
            const auto mw = stats::mann_whitney(g.first, g.second);
            fmt::print(o, "{},{},{},{},{},{},{},{}\n", label, mw.n_a, mw.n_b, real(mw.median_a), real(mw.median_b),
                       real(mw.u), real(mw.p), mw.exact ? 1 : 0);
        };
        for (const auto& [session, g] : groups) row(std::to_string(session), g);
        row("all", pooled);
    });

    if (c.emit_plot_data) {
        run.output("plot_session_emi.csv", [&](std::ostream& o) {
            fmt::print(o, "session,start_year,group,mean_emi,ci_low,ci_high,n_chunks\n");
            auto emit = [&](const scoring::SessionAggregate& a, std::string_view group) {
                fmt::print(o, "{},{},{},{},{},{},{}\n", a.session, corpus::session_start_year(a.session), group,
                           real(a.mean_emi), real(a.ci_low), real(a.ci_high), a.n_chunks);
            };
            for (const auto& a : sessions) emit(a, "all");
            for (const auto& a : by_party) emit(a, corpus::to_string(*a.party));
        });
    }
    fmt::print(io.out, "chunks={} sessions={} party_groups={}\n", scored.size(), sessions.size(), by_party.size());
}

namespace {

void apply_log_columns(stats::TimeSeriesTable& table, const std::vector<std::string>& columns, Run& run) {
    for (const auto& col : columns) {
        if (!table.has_column(col)) continue;
        table.log_transform(col);
        run.note("log_transform." + col, "natural log at ingestion; non-positive values treated as missing");
    }
}

bool is_productivity(std::string_view family) { return family.starts_with("productivity"); }

// EMI main-effect label of a model, if any.
std::optional<std::string> emi_term(const stats::RegressionSpec& spec) {
    if (spec.dependent.column == "EMI") return std::nullopt;
    for (const auto& t : spec.terms)
        if (t.column == "EMI") return t.label();
    return std::nullopt;
}

void write_trend_row(std::ostream& o, const scoring::TrendFit& t, int peak) {
    fmt::print(o,
               "first_session,peak_session,n_points,intercept,se_intercept,p_intercept,slope,se_slope,p_slope,"
               "r_squared\n");
    fmt::print(o, "{},{},{},{},{},{},{},{},{},{}\n", t.first_session, peak, t.n_points, real(t.intercept),
               real(t.se_intercept), real(t.p_intercept), real(t.slope), real(t.se_slope), real(t.p_slope),
               real(t.r_squared));
}

}  // namespace

void cmd_analyze(const AnalyzeConfig& c, Run& run, Console io) {
    require_artifact(c.table, "aggregate (or supply a session-series table)");
    run.input(c.table);
    auto table = stats::TimeSeriesTable::read_csv(c.table);
    apply_log_columns(table, c.log_columns, run);

    auto productivity_table = table;
    if (c.standardize_productivity) {
        std::vector<std::string> done;
        for (const char* col : {"MLI", "LPI", "nlaw", "Mood", "npatents", "Pol", "EMI"}) {
            if (!productivity_table.has_column(col)) continue;
            productivity_table.standardize(col);
            done.emplace_back(col);
        }
        run.note("standardize.productivity", join(done, ","));
    }

    stats::SuiteOptions so;
    so.policy = stats::parse_interaction_policy(c.interaction_policy);
    so.families = c.families;
    for (const auto& o : c.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(fmt::format("override '{}' is not family=policy", o));
        so.overrides[o.substr(0, eq)] = stats::parse_interaction_policy(o.substr(eq + 1));
    }
    const auto suite = stats::build_model_suite(table, so);

    struct Fitted {
        const stats::SuiteModel* model = nullptr;
        std::optional<stats::RegressionFit> fit;
        std::optional<stats::DiagnosticsReport> diag;
        std::optional<stats::BootstrapCoefResult> boot;
        std::string boot_term;
        std::string status = "ok";
    };
    std::vector<Fitted> fitted;
    for (const auto& m : suite) {
        Fitted f;
        f.model = &m;
        const auto& t = is_productivity(m.family) ? productivity_table : table;
        for (const auto& w : m.warnings) fmt::print(io.err, "{}: {}\n", m.spec.name, w);
        try {
            auto fit = stats::ols_fit(m.spec, t);
            if (c.hac_bandwidth >= 0) {
                auto h = stats::hac_se(fit, c.hac_bandwidth);
                fit.hac_se = h.se;
                fit.hac_p = h.p;
                fit.hac_bandwidth = h.bandwidth;
            }
            f.fit = std::move(fit);
        } catch (const std::exception& e) {
            f.status = fmt::format("fit failed: {}", e.what());
            fmt::print(io.err, "{}: {}\n", m.spec.name, f.status);
            fitted.push_back(std::move(f));
            continue;
        }
        try {
            const std::vector<std::string> exclude{stats::Term{m.spec.dependent.column, 1}.label()};
            f.diag = stats::diagnose(*f.fit, exclude);
        } catch (const std::exception& e) {
            f.status = fmt::format("diagnostics skipped: {}", e.what());
            fmt::print(io.err, "{}: {}\n", m.spec.name, f.status);
        }
        // Non-normal residuals: check the EMI coefficient by case resampling.
        if (f.diag && f.diag->jb.p_value < c.jb_alpha) {
            if (auto term = emi_term(m.spec)) {
                stats::BootstrapCoefOptions bo;
                bo.n_boot = c.n_boot;
                bo.seed = c.seed;
                bo.threads = c.threads;
                try {
                    f.boot = stats::bootstrap_coef(m.spec, t, *term, bo);
                    f.boot_term = *term;
                } catch (const std::exception& e) {
                    fmt::print(io.err, "{}: bootstrap failed: {}\n", m.spec.name, e.what());
                }
            }
        }
        fitted.push_back(std::move(f));
    }

    run.output("models.csv", [&](std::ostream& o) {
        fmt::print(o,
                   "model,family,dependent,n_obs,n_params,r_squared,adj_r_squared,f_statistic,f_p,sigma,hac_bandwidth,"
                   "interaction_candidate,interaction_fired,max_vif,status\n");
        for (const auto& f : fitted) {
            const auto& m = *f.model;
            if (f.fit)
                fmt::print(o, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", m.spec.name, m.family,
                           m.spec.dependent.column, f.fit->n_obs(), f.fit->n_params(), real(f.fit->r_squared),
                           real(f.fit->adj_r_squared), real(f.fit->f_statistic), real(f.fit->f_p), real(f.fit->sigma),
                           f.fit->hac_bandwidth, m.interaction_candidate ? 1 : 0, m.interaction_fired ? 1 : 0,
                           real(m.max_vif), csv::escape(f.status));
            else
                fmt::print(o, "{},{},{},,,,,,,,,{},{},{},{}\n", m.spec.name, m.family, m.spec.dependent.column,
                           m.interaction_candidate ? 1 : 0, m.interaction_fired ? 1 : 0, real(m.max_vif),
                           csv::escape(f.status));
        }
    });
    run.output("coefficients.csv", [&](std::ostream& o) {
        fmt::print(o, "model,term,estimate,se,t,p,hac_se,hac_p\n");
        for (const auto& f : fitted) {
            if (!f.fit) continue;
            const auto& fit = *f.fit;
            for (Eigen::Index j = 0; j < fit.n_params(); ++j)
                fmt::print(o, "{},{},{},{},{},{},{},{}\n", f.model->spec.name,
                           csv::escape(fit.labels[static_cast<std::size_t>(j)]), real(fit.coefficients(j)),
                           real(fit.se(j)), real(fit.t(j)), real(fit.p(j)), real(fit.hac_se(j)), real(fit.hac_p(j)));
        }
    });
    run.output("diagnostics.csv", [&](std::ostream& o) {
        fmt::print(o, "model,adf_stat,adf_p,adf_lags,kpss_stat,kpss_band,kpss_p,kpss_bandwidth,jb_stat,jb_p\n");
        for (const auto& f : fitted) {
            if (!f.diag) continue;
            const auto& d = *f.diag;
            fmt::print(o, "{},{},{},{},{},{},{},{},{},{}\n", f.model->spec.name, real(d.adf.statistic),
                       real(d.adf.p_value), d.adf.lags, real(d.kpss.statistic), to_string(d.kpss.band),
                       real(d.kpss.p_value), d.kpss.bandwidth, real(d.jb.statistic), real(d.jb.p_value));
        }
    });
    run.output("vif.csv", [&](std::ostream& o) {
        fmt::print(o, "model,term,vif,collinear\n");
        for (const auto& f : fitted)
            for (const auto& v : f.model->vif)
                fmt::print(o, "{},{},{},{}\n", f.model->spec.name, csv::escape(v.name), real(v.value),
                           v.collinear ? 1 : 0);
    });
    run.output("bootstrap.csv", [&](std::ostream& o) {
        fmt::print(o, "model,term,estimate,ci_low,ci_high,n_boot,n_failed\n");
        for (const auto& f : fitted)
            if (f.boot)
                fmt::print(o, "{},{},{},{},{},{},{}\n", f.model->spec.name, csv::escape(f.boot_term),
                           real(f.boot->estimate), real(f.boot->ci_low), real(f.boot->ci_high), f.boot->n_boot,
                           f.boot->n_failed);
    });

    struct Pair {
        std::string x;
        int x_lag;
        std::string y;
    };
    const std::vector<Pair> pairs{{"EMI", 1, "Ineq"}, {"EMI", 0, "Pol"}, {"EMI", 0, "MLI"},
                                  {"EMI", 0, "LPI"},  {"EMI", 0, "nlaw"}};
    run.output("correlations.csv", [&](std::ostream& o) {
        fmt::print(o, "x,y,n,r,ci_low,ci_high,p\n");
        for (const auto& p : pairs) {
            if (!table.has_column(p.x) || !table.has_column(p.y)) continue;
            const Eigen::VectorXd x = table.lagged(p.x, p.x_lag);
            const Eigen::VectorXd& y = table.column(p.y);
            try {
                const auto r = stats::pearson_ci({x.data(), static_cast<std::size_t>(x.size())},
                                                 {y.data(), static_cast<std::size_t>(y.size())});
                fmt::print(o, "{},{},{},{},{},{},{}\n", stats::Term{p.x, p.x_lag}.label(), p.y, r.n, real(r.r),
                           real(r.ci_low), real(r.ci_high), real(r.p));
            } catch (const std::exception& e) {
                fmt::print(io.err, "correlation {} vs {} skipped: {}\n", p.x, p.y, e.what());
            }
        }
    });

    if (table.has_column("EMI")) {
        std::vector<scoring::SessionAggregate> series;
        const auto& emi = table.column("EMI");
        for (Eigen::Index i = 0; i < table.rows(); ++i) {
            if (std::isnan(emi(i))) continue;
            scoring::SessionAggregate a;
            a.session = table.index()[static_cast<std::size_t>(i)];
            a.mean_emi = emi(i);
            series.push_back(a);
        }
        try {
            const auto t = scoring::trend_fit(series);
            run.output("trend.csv", [&](std::ostream& o) { write_trend_row(o, t, t.first_session); });
        } catch (const std::exception& e) {
            fmt::print(io.err, "trend fit skipped: {}\n", e.what());
        }
    }

    if (c.emit_plot_data) {
        auto emit_columns = [&](std::string_view name, const std::vector<std::string>& wanted) {
            std::vector<std::string> cols;
            for (const auto& w : wanted)
                if (table.has_column(w)) cols.push_back(w);
            if (cols.empty()) return;
            run.output(name, [&](std::ostream& o) {
                fmt::print(o, "session,start_year,{}\n", join(cols, ","));
                for (Eigen::Index i = 0; i < table.rows(); ++i) {
                    const int s = table.index()[static_cast<std::size_t>(i)];
                    fmt::print(o, "{},{}", s, corpus::session_start_year(s));
                    for (const auto& col : cols) fmt::print(o, ",{}", real(table.column(col)(i)));
                    fmt::print(o, "\n");
                }
            });
        };
        emit_columns("plot_emi_pol.csv", {"EMI", "Pol"});
        emit_columns("plot_productivity.csv", {"EMI", "MLI", "LPI", "nlaw", "Mood"});
        run.output("plot_crosscorr.csv", [&](std::ostream& o) {
            fmt::print(o, "x,y,lag,n,r,ci_low,ci_high\n");
            for (auto [x, y] : {std::pair{"EMI", "Pol"}, std::pair{"EMI", "Ineq"}, std::pair{"Ineq", "Pol"}}) {
                if (!table.has_column(x) || !table.has_column(y)) continue;
                const auto& xs = table.column(x);
                const auto& ys = table.column(y);
                const auto cc = stats::lagged_crosscorr({xs.data(), static_cast<std::size_t>(xs.size())},
                                                        {ys.data(), static_cast<std::size_t>(ys.size())}, c.max_lag);
                for (const auto& l : cc.lags)
                    fmt::print(o, "{},{},{},{},{},{},{}\n", x, y, l.lag, l.corr.n, real(l.corr.r),
                               real(l.corr.ci_low), real(l.corr.ci_high));
            }
        });
    }

    std::size_t ok = 0;
    for (const auto& f : fitted) ok += f.fit ? 1 : 0;
    fmt::print(io.out, "models={} fitted={} bootstrapped={}\n", fitted.size(), ok,
               std::count_if(fitted.begin(), fitted.end(), [](const auto& f) { return f.boot.has_value(); }));
}

void cmd_validate(const ValidateConfig& c, Run& run, Console io) {
    require_artifact(c.labels, "validate-auc --labels <ratings.csv> (human ratings)");
    run.input(c.labels);
    const auto labels = csv::read(c.labels);
    const std::size_t c_label = labels.column("label");

    std::vector<double> scores;
    std::vector<int> ys;
    std::vector<std::optional<int>> decades;
    std::map<std::string, const scoring::ScoredChunk*> by_id;
    std::vector<scoring::ScoredChunk> scored;
    const bool direct = labels.has_column("emi");
    if (!direct) {
        const auto scored_path = or_default(c.scored, run.output_path("scored.csv"));
        require_artifact(scored_path, "score");
        run.input(scored_path);
        scored = scoring::read_scored_csv(scored_path);
        for (const auto& s : scored) by_id[s.chunk_id] = &s;
    }
    const auto c_decade = labels.has_column("decade") ? std::optional(labels.column("decade")) : std::nullopt;
    const auto c_year = labels.has_column("year") ? std::optional(labels.column("year")) : std::nullopt;
    std::size_t unmatched = 0;
    for (std::size_t r = 0; r < labels.rows.size(); ++r) {
        const auto& row = labels.rows[r];
        const double lab = csv::parse_real(row.at(c_label));
        if (lab != 0.0 && lab != 1.0)
            throw DataError(fmt::format("{}: row {}: label must be 0 or 1", c.labels.string(), r + 2));
        std::optional<int> decade;
        if (c_decade && !row.at(*c_decade).empty()) decade = static_cast<int>(csv::parse_real(row.at(*c_decade)));
        else if (c_year && !row.at(*c_year).empty()) decade = decade_of(static_cast<int>(csv::parse_real(row.at(*c_year))));
        double score;
        if (direct) {
            score = csv::parse_real(row.at(labels.column("emi")));
        } else {
            auto it = by_id.find(row.at(labels.column("chunk_id")));
            if (it == by_id.end()) {
                ++unmatched;
                continue;
            }
            score = it->second->emi;
            if (!decade) decade = decade_of(corpus::session_start_year(it->second->session));
        }
        scores.push_back(score);
        ys.push_back(static_cast<int>(lab));
        decades.push_back(decade);
    }
    if (unmatched > 0) fmt::print(io.err, "{} labelled chunk(s) not found among scored chunks\n", unmatched);

    auto summarize = [&](std::ostream& o, std::string_view group, const std::vector<double>& s,
                         const std::vector<int>& y) {
        const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
        const std::size_t neg = y.size() - pos;
        const std::string auc = pos > 0 && neg > 0 ? real(stats::roc_auc(s, y)) : "";
        fmt::print(o, "{},{},{},{},{}\n", group, y.size(), pos, neg, auc);
        return auc;
    };
    std::string overall;
    run.output("auc.csv", [&](std::ostream& o) {
        fmt::print(o, "group,n,n_pos,n_neg,auc\n");
        overall = summarize(o, "overall", scores, ys);
        std::map<int, std::pair<std::vector<double>, std::vector<int>>> groups;
        for (std::size_t i = 0; i < scores.size(); ++i)
            if (decades[i]) {
                groups[*decades[i]].first.push_back(scores[i]);
                groups[*decades[i]].second.push_back(ys[i]);
            }
        for (const auto& [d, g] : groups) summarize(o, std::to_string(d), g.first, g.second);
    });
    if (overall.empty()) throw DataError("labels contain a single class; AUC is undefined");
    fmt::print(io.out, "n={} auc={}\n", scores.size(), overall);
}

void cmd_trend(const TrendConfig& c, Run& run, Console io) {
    const auto path = or_default(c.aggregates, run.output_path("aggregates.csv"));
    require_artifact(path, "aggregate");
    run.input(path);
    auto all = scoring::read_aggregates_csv(path);
    std::vector<scoring::SessionAggregate> sessions;
    for (const auto& a : all)
        if (!a.party && !a.chamber) sessions.push_back(a);
    const auto t = scoring::trend_fit(sessions);
    run.output("trend.csv", [&](std::ostream& o) { write_trend_row(o, t, t.first_session); });
    if (c.emit_plot_data) {
        run.output("plot_trend.csv", [&](std::ostream& o) {
            fmt::print(o, "session,start_year,t,mean_emi,fitted\n");
            for (const auto& a : sessions) {
                if (a.session < t.first_session) continue;
                const int tt = a.session - t.first_session;
                fmt::print(o, "{},{},{},{},{}\n", a.session, corpus::session_start_year(a.session), tt,
                           real(a.mean_emi), real(t.intercept + t.slope * tt));
            }
        });
    }
    fmt::print(io.out, "peak_session={} n={} intercept={:.4f} slope={:.4f} r2={:.4f}\n", t.first_session,
               t.n_points, t.intercept, t.slope, t.r_squared);
}

void cmd_crosscorr(const CrosscorrConfig& c, Run& run, Console io) {
    require_artifact(c.table, "aggregate (or supply a session-series table)");
    run.input(c.table);
    auto table = stats::TimeSeriesTable::read_csv(c.table);
    apply_log_columns(table, c.log_columns, run);
    const auto& x = table.column(c.x);
    const auto& y = table.column(c.y);
    const auto cc = stats::lagged_crosscorr({x.data(), static_cast<std::size_t>(x.size())},
                                            {y.data(), static_cast<std::size_t>(y.size())}, c.max_lag);
    for (const auto& w : cc.warnings) fmt::print(io.err, "{}\n", w);
    run.output("crosscorr.csv", [&](std::ostream& o) {
        fmt::print(o, "x,y,lag,n,r,ci_low,ci_high,p,peak\n");
        for (const auto& l : cc.lags)
            fmt::print(o, "{},{},{},{},{},{},{},{},{}\n", c.x, c.y, l.lag, l.corr.n, real(l.corr.r),
                       real(l.corr.ci_low), real(l.corr.ci_high), real(l.corr.p), l.lag == cc.peak_lag ? 1 : 0);
    });
    fmt::print(io.out, "peak_lag={} r={:.4f}\n", cc.peak_lag, cc.peak().corr.r);
}

}  // namespace emi::cli
