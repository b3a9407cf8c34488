#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "emi/corpus.hpp"
#include "emi/errors.hpp"
#include "emi/sgns.hpp"

namespace emi::embeddings {

using Matrix = RowMatrix<float>;
using TokenLists = std::span<const std::vector<std::string>>;

class Vocabulary {
public:
    Vocabulary() = default;

    // Words ordered by descending count, ties lexicographic.
    static Vocabulary from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                  std::uint64_t min_count);

    std::optional<Eigen::Index> index_of(std::string_view word) const;
    bool contains(std::string_view word) const { return index_of(word).has_value(); }
    const std::string& word(Eigen::Index i) const { return words_[static_cast<std::size_t>(i)]; }
    std::uint64_t count(Eigen::Index i) const { return counts_[static_cast<std::size_t>(i)]; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(words_.size()); }
    bool empty() const { return words_.empty(); }
    // Count of in-vocabulary tokens.
    std::uint64_t total_count() const { return total_; }
    std::uint64_t min_count() const { return min_count_; }
    const std::vector<std::string>& words() const { return words_; }

    // Appends a word with the given count; the caller keeps the ordering contract.
    void push_back(std::string word, std::uint64_t count);

private:
    std::vector<std::string> words_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, Eigen::Index> index_;
    std::uint64_t total_ = 0;
    std::uint64_t min_count_ = 1;
};

Vocabulary build_vocab(TokenLists docs, std::uint64_t min_count = 5);
Vocabulary build_vocab(std::span<const corpus::Chunk> chunks, std::uint64_t min_count = 5);

struct TrainingParams {
    int dim = 300;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double alpha0 = 0.025;
    double subsample = 1e-5;  // 0 disables subsampling
    std::uint64_t seed = 1;
    int threads = 1;          // 1 = sequential and deterministic
    std::uint64_t min_count = 5;
};

struct EmbeddingModel {
    Vocabulary vocab;
    Matrix input;   // center vectors, one row per word
    Matrix output;  // context vectors
    TrainingParams params;

    int dim() const { return static_cast<int>(input.cols()); }
    Eigen::Index size() const { return input.rows(); }
};

// Draws word indices with probability proportional to count^0.75.
class NegativeSampler {
public:
    explicit NegativeSampler(const Vocabulary& vocab, double power = 0.75);

    template <typename Rng>
    Eigen::Index operator()(Rng& rng) {
        return static_cast<Eigen::Index>(dist_(rng));
    }

    std::vector<double> probabilities() const { return dist_.probabilities(); }

private:
    std::discrete_distribution<std::int64_t> dist_;
};

// Probability of keeping an occurrence of a word with corpus frequency `freq`:
// min(1, sqrt(t / freq)); 1 when t <= 0.
double keep_probability(double freq, double subsample);

// Progress lines "epoch=..,tokens_per_sec=..,alpha=.." are written to `log` if given.
EmbeddingModel train_sgns(TokenLists docs, const Vocabulary& vocab, const TrainingParams& params,
                          std::ostream* log = nullptr);
EmbeddingModel train_sgns(std::span<const corpus::Chunk> chunks, const Vocabulary& vocab,
                          const TrainingParams& params, std::ostream* log = nullptr);

struct DocVector {
    Eigen::VectorXd vector;  // empty when n_content_words == 0
    int n_content_words = 0;

    bool empty() const { return n_content_words == 0; }
};

// Mean input vector of the tokens that are in the vocabulary and not stopwords.
DocVector doc_vector(const EmbeddingModel& model, std::span<const std::string> tokens,
                     const corpus::WordSet& stopwords);

// Input vector of an in-vocabulary word, widened to double.
Eigen::VectorXd word_vector(const EmbeddingModel& model, Eigen::Index index);

template <typename A, typename B>
double cosine(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    const double na = a.template cast<double>().norm();
    const double nb = b.template cast<double>().norm();
    if (na == 0.0 || nb == 0.0) throw NumericalError("cosine similarity of a zero-norm vector");
    const double c = a.template cast<double>().dot(b.template cast<double>()) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

class ModelParseError : public DataError {
public:
    enum class Kind { MalformedHeader, MalformedRow, DimensionMismatch, DuplicateWord, TruncatedFile };

    ModelParseError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Text format: "V d" header, then one line per word: word followed by d floats.
// With `binary_sidecar`, the matrices are also written bit-exact to "<path>.bin";
// load_model uses the sidecar when present. Training parameters, when known,
// go to "<path>.params" as key=value lines.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path,
                bool binary_sidecar = false);
EmbeddingModel load_model(const std::filesystem::path& path);
EmbeddingModel read_text_model(std::istream& in);

}  // namespace emi::embeddings
