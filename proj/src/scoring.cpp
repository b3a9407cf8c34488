#include "emi/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <tuple>
#include <unordered_set>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "emi/csv.hpp"
#include "emi/errors.hpp"
#include "emi/stats/descriptive.hpp"
#include "emi/stats/regression.hpp"

namespace emi::scoring {

ConstructDictionary ConstructDictionary::load(const std::filesystem::path& path, std::string name) {
    ConstructDictionary dict;
    dict.name = std::move(name);
    std::unordered_set<std::string> seen;
    for (const auto& raw : corpus::read_word_list(path)) {
        // Collapse internal whitespace so "fake  news" and "fake news" coincide.
        std::string entry;
        for (const auto& w : corpus::tokenize(raw)) entry += (entry.empty() ? "" : " ") + w;
        if (entry.empty()) continue;
        if (!seen.insert(entry).second)
            throw DataError(fmt::format("dictionary '{}' lists '{}' twice", path.string(), entry));
        dict.entries.push_back(std::move(entry));
    }
    if (dict.entries.empty()) throw DataError(fmt::format("dictionary '{}' is empty", path.string()));
    return dict;
}

ConstructVector construct_vector(const ConstructDictionary& dict, const embeddings::EmbeddingModel& model) {
    ConstructVector cv;
    cv.name = dict.name;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.dim());
    for (const auto& entry : dict.entries) {
        Eigen::VectorXd part = Eigen::VectorXd::Zero(model.dim());
        int found = 0;
        for (const auto& word : corpus::tokenize(entry)) {
            if (auto idx = model.vocab.index_of(word)) {
                part += embeddings::word_vector(model, *idx);
                ++found;
            }
        }
        if (found == 0) {
            cv.unresolved.push_back(entry);
            continue;
        }
        sum += found == 1 ? part : Eigen::VectorXd(part / static_cast<double>(found));
        ++cv.n_resolved;
    }
    if (cv.n_resolved == 0)
        throw DataError(fmt::format("no entry of the '{}' dictionary is in the model vocabulary", dict.name));
    cv.vector = sum / static_cast<double>(cv.n_resolved);
    return cv;
}

ScoreResult score_chunks(std::span<const corpus::Chunk> chunks, const embeddings::EmbeddingModel& model,
                         const ConstructVector& evidence, const ConstructVector& intuition,
                         const corpus::WordSet& stopwords) {
    if (evidence.vector.size() != model.dim() || intuition.vector.size() != model.dim())
        throw DataError(fmt::format("construct vectors have dimension {}/{}, model has {}", evidence.vector.size(),
                                    intuition.vector.size(), model.dim()));
    ScoreResult out;
    out.chunks.reserve(chunks.size());
    for (const auto& chunk : chunks) {
        const auto doc = embeddings::doc_vector(model, chunk.tokens, stopwords);
        if (doc.empty()) {
            ++out.n_dropped;
            continue;
        }
        ScoredChunk s;
        s.chunk_id = chunk.chunk_id;
        s.session = chunk.session;
        s.party = chunk.party;
        s.chamber = chunk.chamber;
        s.length = chunk.length();
        s.sim_e = embeddings::cosine(doc.vector, evidence.vector);
        s.sim_i = embeddings::cosine(doc.vector, intuition.vector);
        out.chunks.push_back(std::move(s));
    }
    return out;
}

std::size_t LengthBins::bin_of(std::size_t length) const {
    if (width == 0) throw std::invalid_argument("length bin width must be positive");
    return std::min(length, open_from) / width;
}

std::vector<ScoredChunk> length_adjust(std::vector<ScoredChunk> scored, const LengthBins& bins) {
    struct Acc {
        double e = 0, i = 0;
        std::size_t n = 0;
    };
    std::map<std::size_t, Acc> acc;
    for (const auto& s : scored) {
        auto& a = acc[bins.bin_of(s.length)];
        a.e += s.sim_e;
        a.i += s.sim_i;
        ++a.n;
    }
    for (auto& s : scored) {
        const auto& a = acc[bins.bin_of(s.length)];
        s.adj_e = s.sim_e - a.e / static_cast<double>(a.n);
        s.adj_i = s.sim_i - a.i / static_cast<double>(a.n);
    }
    return scored;
}

std::vector<ScoredChunk> z_transform(std::vector<ScoredChunk> scored) {
    if (scored.size() < 2) throw DataError("z-transform needs at least two scored chunks");
    std::vector<double> e, i;
    for (const auto& s : scored) {
        e.push_back(s.adj_e);
        i.push_back(s.adj_i);
    }
    const double me = stats::mean(e), mi = stats::mean(i);
    const double se = stats::population_sd(e), si = stats::population_sd(i);
    if (se == 0.0 || si == 0.0) throw ZeroVarianceError("adjusted similarities have zero variance");
    for (auto& s : scored) {
        s.z_e = (s.adj_e - me) / se;
        s.z_i = (s.adj_i - mi) / si;
        s.emi = s.z_e - s.z_i;
    }
    return scored;
}

std::vector<SessionAggregate> aggregate(std::span<const ScoredChunk> scored, const GroupKeys& keys,
                                        const BootstrapOptions& options) {
    if (options.n_boot < 1) throw std::invalid_argument("n_boot must be positive");
    using Key = std::tuple<int, int, int>;  // session, party, chamber; -1 when not grouped
    std::map<Key, std::vector<double>> groups;
    for (const auto& s : scored) {
        const Key k{keys.session ? s.session : -1, keys.party ? static_cast<int>(s.party) : -1,
                    keys.chamber ? static_cast<int>(s.chamber) : -1};
        groups[k].push_back(s.emi);
    }

    std::vector<SessionAggregate> out;
    for (const auto& [key, values] : groups) {
        const auto [session, party, chamber] = key;
        SessionAggregate a;
        a.session = session;
        if (party >= 0) a.party = static_cast<corpus::Party>(party);
        if (chamber >= 0) a.chamber = static_cast<corpus::Chamber>(chamber);
        a.n_chunks = values.size();
        a.mean_emi = stats::mean(values);

        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(session), static_cast<std::uint32_t>(party + 1),
                          static_cast<std::uint32_t>(chamber + 1)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
        std::vector<double> means(static_cast<std::size_t>(options.n_boot));
        for (auto& m : means) {
            double sum = 0.0;
            for (std::size_t k = 0; k < values.size(); ++k) sum += values[pick(rng)];
            m = sum / static_cast<double>(values.size());
        }
        std::sort(means.begin(), means.end());
        const double tail = (1.0 - options.level) / 2.0;
        // Rounding in the replicate sums can put a degenerate interval a hair off the mean.
        a.ci_low = std::min(stats::quantile_sorted(means, tail), a.mean_emi);
        a.ci_high = std::max(stats::quantile_sorted(means, 1.0 - tail), a.mean_emi);
        out.push_back(a);
    }
    return out;
}

TrendFit linear_trend(std::span<const int> sessions, std::span<const double> values) {
    if (sessions.size() != values.size()) throw std::invalid_argument("trend inputs differ in length");
    if (sessions.size() < 3) throw DataError(fmt::format("trend fit needs at least 3 points, got {}", sessions.size()));
    const auto n = static_cast<Eigen::Index>(sessions.size());
    const int first = *std::min_element(sessions.begin(), sessions.end());
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        X(k, 0) = 1.0;
        X(k, 1) = static_cast<double>(sessions[static_cast<std::size_t>(k)] - first);
        y(k) = values[static_cast<std::size_t>(k)];
    }
    const auto fit = stats::ols_fit(X, y, {"Intercept", "t"}, true);
    TrendFit t;
    t.intercept = fit.coefficients(0);
    t.slope = fit.coefficients(1);
    t.se_intercept = fit.se(0);
    t.se_slope = fit.se(1);
    t.p_intercept = fit.p(0);
    t.p_slope = fit.p(1);
    t.r_squared = fit.r_squared;
    t.first_session = first;
    t.n_points = sessions.size();
    return t;
}

TrendFit trend_fit(std::span<const SessionAggregate> aggregates) {
    if (aggregates.empty()) throw DataError("trend fit needs session aggregates");
    for (const auto& a : aggregates)
        if (a.party || a.chamber) throw DataError("trend fit needs session-only aggregates");
    auto peak = std::max_element(aggregates.begin(), aggregates.end(),
                                 [](const auto& a, const auto& b) { return a.mean_emi < b.mean_emi; });
    std::vector<int> sessions;
    std::vector<double> values;
    for (const auto& a : aggregates) {
        if (a.session < peak->session) continue;
        sessions.push_back(a.session);
        values.push_back(a.mean_emi);
    }
    return linear_trend(sessions, values);
}

void write_scored_csv(std::ostream& out, std::span<const ScoredChunk> scored) {
    fmt::print(out, "chunk_id,session,party,chamber,length,sim_e,sim_i,adj_e,adj_i,z_e,z_i,emi\n");
    for (const auto& s : scored)
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{}\n", csv::escape(s.chunk_id), s.session,
                   corpus::to_string(s.party), corpus::to_string(s.chamber), s.length, s.sim_e, s.sim_i, s.adj_e,
                   s.adj_i, s.z_e, s.z_i, s.emi);
}

std::vector<ScoredChunk> read_scored_csv(const std::filesystem::path& path) {
    const auto t = csv::read(path);
    const std::size_t c_id = t.column("chunk_id"), c_session = t.column("session"), c_party = t.column("party"),
                      c_chamber = t.column("chamber"), c_length = t.column("length"), c_se = t.column("sim_e"),
                      c_si = t.column("sim_i"), c_ae = t.column("adj_e"), c_ai = t.column("adj_i"),
                      c_ze = t.column("z_e"), c_zi = t.column("z_i"), c_emi = t.column("emi");
    std::vector<ScoredChunk> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            ScoredChunk s;
            s.chunk_id = row.at(c_id);
            s.session = static_cast<int>(csv::parse_real(row.at(c_session)));
            s.party = corpus::parse_party(row.at(c_party));
            s.chamber = corpus::parse_chamber(row.at(c_chamber));
            s.length = static_cast<std::size_t>(csv::parse_real(row.at(c_length)));
            s.sim_e = csv::parse_real(row.at(c_se));
            s.sim_i = csv::parse_real(row.at(c_si));
            s.adj_e = csv::parse_real(row.at(c_ae));
            s.adj_i = csv::parse_real(row.at(c_ai));
            s.z_e = csv::parse_real(row.at(c_ze));
            s.z_i = csv::parse_real(row.at(c_zi));
            s.emi = csv::parse_real(row.at(c_emi));
            out.push_back(std::move(s));
        } catch (const std::exception& e) {
            throw DataError(fmt::format("{}: row {}: {}", path.string(), r + 2, e.what()));
        }
    }
    return out;
}

void write_aggregates_csv(std::ostream& out, std::span<const SessionAggregate> aggregates) {
    fmt::print(out, "session,party,chamber,mean_emi,n_chunks,ci_low,ci_high\n");
    for (const auto& a : aggregates)
        fmt::print(out, "{},{},{},{},{},{},{}\n", a.session, a.party ? corpus::to_string(*a.party) : "",
                   a.chamber ? corpus::to_string(*a.chamber) : "", a.mean_emi, a.n_chunks, a.ci_low, a.ci_high);
}

std::vector<SessionAggregate> read_aggregates_csv(const std::filesystem::path& path) {
    const auto t = csv::read(path);
    const std::size_t c_session = t.column("session"), c_mean = t.column("mean_emi"), c_n = t.column("n_chunks"),
                      c_lo = t.column("ci_low"), c_hi = t.column("ci_high");
    const auto c_party = t.has_column("party") ? std::optional(t.column("party")) : std::nullopt;
    const auto c_chamber = t.has_column("chamber") ? std::optional(t.column("chamber")) : std::nullopt;
    std::vector<SessionAggregate> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            SessionAggregate a;
            a.session = static_cast<int>(csv::parse_real(row.at(c_session)));
            if (c_party && !row.at(*c_party).empty()) a.party = corpus::parse_party(row.at(*c_party));
            if (c_chamber && !row.at(*c_chamber).empty()) a.chamber = corpus::parse_chamber(row.at(*c_chamber));
            a.mean_emi = csv::parse_real(row.at(c_mean));
            a.n_chunks = static_cast<std::size_t>(csv::parse_real(row.at(c_n)));
            a.ci_low = csv::parse_real(row.at(c_lo));
            a.ci_high = csv::parse_real(row.at(c_hi));
            out.push_back(a);
        } catch (const std::exception& e) {
            throw DataError(fmt::format("{}: row {}: {}", path.string(), r + 2, e.what()));
        }
    }
    return out;
}

}  // namespace emi::scoring
