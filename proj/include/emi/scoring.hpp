#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emi/corpus.hpp"
#include "emi/embeddings.hpp"

namespace emi::scoring {

struct ConstructDictionary {
    std::string name;
    // Single words or whitespace-separated phrases, lowercase, unique.
    std::vector<std::string> entries;

    static ConstructDictionary load(const std::filesystem::path& path, std::string name);
};

struct ConstructVector {
    std::string name;
    Eigen::VectorXd vector;
    int n_resolved = 0;
    std::vector<std::string> unresolved;
};

// Unweighted mean over resolved entries; a phrase entry contributes the mean of
// its in-vocabulary constituent words. Throws DataError when nothing resolves.
ConstructVector construct_vector(const ConstructDictionary& dict, const embeddings::EmbeddingModel& model);

struct ScoredChunk {
    std::string chunk_id;
    int session = 0;
    corpus::Party party = corpus::Party::Other;
    corpus::Chamber chamber = corpus::Chamber::House;
    std::size_t length = 0;
    double sim_e = 0, sim_i = 0;
    double adj_e = 0, adj_i = 0;
    double z_e = 0, z_i = 0;
    double emi = 0;
};

struct ScoreResult {
    std::vector<ScoredChunk> chunks;
    std::size_t n_dropped = 0;  // chunks without content words
};

// Fills sim_e / sim_i; chunks with an empty document vector are dropped and counted.
ScoreResult score_chunks(std::span<const corpus::Chunk> chunks, const embeddings::EmbeddingModel& model,
                         const ConstructVector& evidence, const ConstructVector& intuition,
                         const corpus::WordSet& stopwords);

struct LengthBins {
    std::size_t width = 25;
    std::size_t open_from = 200;  // lengths >= open_from share the last bin

    std::size_t bin_of(std::size_t length) const;
};

// adj = sim - mean(sim in the chunk's length bin), per construct.
std::vector<ScoredChunk> length_adjust(std::vector<ScoredChunk> scored, const LengthBins& bins = {});

// Pooled z-scores of the adjusted similarities (population sd), emi = z_e - z_i.
// Throws ZeroVarianceError for a constant series and DataError for fewer than 2 chunks.
std::vector<ScoredChunk> z_transform(std::vector<ScoredChunk> scored);

struct GroupKeys {
    bool session = true;
    bool party = false;
    bool chamber = false;
};

struct SessionAggregate {
    int session = 0;
    std::optional<corpus::Party> party;
    std::optional<corpus::Chamber> chamber;
    double mean_emi = 0;
    std::size_t n_chunks = 0;
    double ci_low = 0, ci_high = 0;
};

struct BootstrapOptions {
    int n_boot = 10000;
    std::uint64_t seed = 1;
    double level = 0.95;
};

// Group means of emi with percentile-bootstrap CIs from chunk resampling.
// Groups are ordered by (session, party, chamber); each group draws from its
// own seeded stream, so results do not depend on group count or order.
std::vector<SessionAggregate> aggregate(std::span<const ScoredChunk> scored, const GroupKeys& keys,
                                        const BootstrapOptions& options = {});

struct TrendFit {
    double intercept = 0, slope = 0;
    double r_squared = 0;
    double p_intercept = 1, p_slope = 1;
    double se_intercept = 0, se_slope = 0;
    int first_session = 0;  // t = 0
    std::size_t n_points = 0;
};

// OLS of mean_emi on t = session - first_session over the aggregates at or after
// the peak session. Requires session-only aggregates; throws DataError for < 3 points.
TrendFit trend_fit(std::span<const SessionAggregate> aggregates);
// Same fit over every point given, no peak restriction.
TrendFit linear_trend(std::span<const int> sessions, std::span<const double> values);

// CSV I/O for the scored-chunk and aggregate files.
void write_scored_csv(std::ostream& out, std::span<const ScoredChunk> scored);
std::vector<ScoredChunk> read_scored_csv(const std::filesystem::path& path);
void write_aggregates_csv(std::ostream& out, std::span<const SessionAggregate> aggregates);
std::vector<SessionAggregate> read_aggregates_csv(const std::filesystem::path& path);

}  // namespace emi::scoring
