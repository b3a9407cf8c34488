#include "emi/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace emi::embeddings {

void Vocabulary::push_back(std::string word, std::uint64_t count) {
    const auto idx = static_cast<Eigen::Index>(words_.size());
    if (!index_.emplace(word, idx).second)
        throw DataError(fmt::format("duplicate vocabulary word '{}'", word));
    words_.push_back(std::move(word));
    counts_.push_back(count);
    total_ += count;
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                   std::uint64_t min_count) {
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [word, n] : counts)
        if (n >= min_count) kept.emplace_back(word, n);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    Vocabulary vocab;
    vocab.min_count_ = min_count;
    vocab.words_.reserve(kept.size());
    for (auto& [word, n] : kept) vocab.push_back(std::move(word), n);
    return vocab;
}

std::optional<Eigen::Index> Vocabulary::index_of(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vocabulary build_vocab(TokenLists docs, std::uint64_t min_count) {
    if (docs.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& doc : docs)
        for (const auto& token : doc) ++counts[token];
    return Vocabulary::from_counts(counts, min_count);
}

namespace {

std::vector<std::vector<std::string>> token_lists(std::span<const corpus::Chunk> chunks) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(chunks.size());
    for (const auto& c : chunks) docs.push_back(c.tokens);
    return docs;
}

}  // namespace

Vocabulary build_vocab(std::span<const corpus::Chunk> chunks, std::uint64_t min_count) {
    auto docs = token_lists(chunks);
    return build_vocab(TokenLists(docs), min_count);
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, double power) {
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(vocab.size()));
    for (Eigen::Index i = 0; i < vocab.size(); ++i)
        weights.push_back(std::pow(static_cast<double>(vocab.count(i)), power));
    dist_ = std::discrete_distribution<std::int64_t>(weights.begin(), weights.end());
}

double keep_probability(double freq, double subsample) {
    if (subsample <= 0.0 || freq <= 0.0) return 1.0;
    return std::min(1.0, std::sqrt(subsample / freq));
}

namespace {

void validate(const Vocabulary& vocab, const TrainingParams& p) {
    if (p.dim <= 0) throw std::invalid_argument("embedding dimension must be positive");
    if (vocab.empty()) throw DataError("cannot train on an empty vocabulary");
    if (p.window < 1) throw std::invalid_argument("window must be at least 1");
    if (p.negatives < 0) throw std::invalid_argument("negatives must be non-negative");
    if (p.epochs < 1) throw std::invalid_argument("epochs must be at least 1");
    if (p.threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (!(p.alpha0 > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

class Trainer {
public:
    Trainer(EmbeddingModel& model, const std::vector<std::vector<Eigen::Index>>& docs,
            const TrainingParams& params)
        : model_(model), docs_(docs), params_(params), sampler_(model.vocab) {
        for (const auto& d : docs_) total_words_ += d.size();
        keep_.resize(static_cast<std::size_t>(model.vocab.size()));
        const double total = static_cast<double>(model.vocab.total_count());
        for (Eigen::Index i = 0; i < model.vocab.size(); ++i)
            keep_[static_cast<std::size_t>(i)] =
                keep_probability(static_cast<double>(model.vocab.count(i)) / total, params.subsample);
        schedule_ = static_cast<double>(params.epochs) * static_cast<double>(total_words_) + 1.0;
    }

    double alpha() const {
        const double progress = static_cast<double>(processed_.load(std::memory_order_relaxed)) / schedule_;
        return params_.alpha0 * std::max(1e-4, 1.0 - progress);
    }

    void run_slice(std::size_t begin, std::size_t end, std::mt19937_64& rng, NegativeSampler& sampler) {
        RowVector<float> scratch(model_.dim());
        std::vector<Eigen::Index> sentence;
        std::vector<Eigen::Index> negatives(static_cast<std::size_t>(params_.negatives));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<int> shrink(1, params_.window);

        for (std::size_t d = begin; d < end; ++d) {
            const auto& doc = docs_[d];
            const float alpha = static_cast<float>(this->alpha());
            sentence.clear();
            for (Eigen::Index w : doc) {
                const double keep = keep_[static_cast<std::size_t>(w)];
                if (keep < 1.0 && unit(rng) >= keep) continue;
                sentence.push_back(w);
            }
            const auto n = static_cast<std::ptrdiff_t>(sentence.size());
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                const int b = shrink(rng);
                const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - b);
                const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + b);
                for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    for (auto& neg : negatives) neg = sampler(rng);
                    sgns_step<float>(model_.input, model_.output, sentence[static_cast<std::size_t>(i)],
                                     sentence[static_cast<std::size_t>(j)], negatives, alpha, scratch);
                }
            }
            processed_.fetch_add(doc.size(), std::memory_order_relaxed);
        }
    }

    void train(std::ostream* log) {
        std::mt19937_64 rng(params_.seed);
        // Per-worker generators for the parallel mode, seeded from the run seed.
        std::vector<std::mt19937_64> worker_rngs;
        std::vector<NegativeSampler> worker_samplers;
        for (int t = 0; t < params_.threads; ++t) {
            std::seed_seq seq{params_.seed, static_cast<std::uint64_t>(t)};
            worker_rngs.emplace_back(seq);
            worker_samplers.push_back(sampler_);
        }

        for (int epoch = 0; epoch < params_.epochs; ++epoch) {
            const auto start = std::chrono::steady_clock::now();
            const auto before = processed_.load();
            if (params_.threads == 1) {
                run_slice(0, docs_.size(), rng, sampler_);
            } else {
                // Workers update the shared matrices without synchronization
                // (Hogwild-style); results depend on scheduling.
                std::vector<std::thread> workers;
                const std::size_t n = docs_.size();
                const auto threads = static_cast<std::size_t>(params_.threads);
                for (std::size_t t = 0; t < threads; ++t) {
                    workers.emplace_back([this, t, n, threads, &worker_rngs, &worker_samplers] {
                        run_slice(n * t / threads, n * (t + 1) / threads, worker_rngs[t], worker_samplers[t]);
                    });
                }
                for (auto& w : workers) w.join();
            }
            if (log) {
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                const double rate = secs > 0 ? static_cast<double>(processed_.load() - before) / secs : 0.0;
                fmt::print(*log, "epoch={},tokens_per_sec={:.0f},alpha={:.6g}\n", epoch + 1, rate, alpha());
            }
        }
    }

private:
    EmbeddingModel& model_;
    const std::vector<std::vector<Eigen::Index>>& docs_;
    TrainingParams params_;
    NegativeSampler sampler_;
    std::vector<double> keep_;
    std::size_t total_words_ = 0;
    double schedule_ = 1.0;
    std::atomic<std::uint64_t> processed_{0};
};

}  // namespace

EmbeddingModel train_sgns(TokenLists docs, const Vocabulary& vocab, const TrainingParams& params,
                          std::ostream* log) {
    validate(vocab, params);
    EmbeddingModel model;
    model.vocab = vocab;
    model.params = params;
    model.params.min_count = vocab.min_count();

    const Eigen::Index V = vocab.size();
    const int d = params.dim;
    model.input.resize(V, d);
    model.output = Matrix::Zero(V, d);
    std::mt19937_64 init_rng(params.seed ^ 0x9E3779B97F4A7C15ULL);
    std::uniform_real_distribution<float> init(-0.5f / static_cast<float>(d), 0.5f / static_cast<float>(d));
    for (Eigen::Index i = 0; i < V; ++i)
        for (int j = 0; j < d; ++j) model.input(i, j) = init(init_rng);

    std::vector<std::vector<Eigen::Index>> encoded;
    encoded.reserve(docs.size());
    for (const auto& doc : docs) {
        std::vector<Eigen::Index> ids;
        ids.reserve(doc.size());
        for (const auto& token : doc)
            if (auto idx = vocab.index_of(token)) ids.push_back(*idx);
        encoded.push_back(std::move(ids));
    }

    Trainer trainer(model, encoded, params);
    trainer.train(log);

    if (!model.input.allFinite() || !model.output.allFinite())
        throw NumericalError("training produced non-finite embedding values");
    return model;
}

EmbeddingModel train_sgns(std::span<const corpus::Chunk> chunks, const Vocabulary& vocab,
                          const TrainingParams& params, std::ostream* log) {
    auto docs = token_lists(chunks);
    return train_sgns(TokenLists(docs), vocab, params, log);
}

Eigen::VectorXd word_vector(const EmbeddingModel& model, Eigen::Index index) {
    return model.input.row(index).transpose().cast<double>();
}

DocVector doc_vector(const EmbeddingModel& model, std::span<const std::string> tokens,
                     const corpus::WordSet& stopwords) {
    DocVector doc;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.dim());
    for (const auto& token : tokens) {
        if (stopwords.contains(token)) continue;
        auto idx = model.vocab.index_of(token);
        if (!idx) continue;
        sum += model.input.row(*idx).transpose().cast<double>();
        ++doc.n_content_words;
    }
    if (doc.n_content_words > 0) doc.vector = sum / static_cast<double>(doc.n_content_words);
    return doc;
}

namespace {

using Kind = ModelParseError::Kind;

void write_params(const TrainingParams& p, std::ostream& out) {
    fmt::print(out,
               "dim={}\nwindow={}\nnegatives={}\nepochs={}\nalpha0={}\nsubsample={}\nseed={}\n"
               "threads={}\nmin_count={}\nmode={}\n",
               p.dim, p.window, p.negatives, p.epochs, p.alpha0, p.subsample, p.seed, p.threads,
               p.min_count, p.threads == 1 ? "deterministic" : "parallel");
}

void read_params(std::istream& in, TrainingParams& p, std::vector<std::uint64_t>& counts) {
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "dim") p.dim = std::stoi(value);
            else if (key == "window") p.window = std::stoi(value);
            else if (key == "negatives") p.negatives = std::stoi(value);
            else if (key == "epochs") p.epochs = std::stoi(value);
            else if (key == "alpha0") p.alpha0 = std::stod(value);
            else if (key == "subsample") p.subsample = std::stod(value);
            else if (key == "seed") p.seed = std::stoull(value);
            else if (key == "threads") p.threads = std::stoi(value);
            else if (key == "min_count") p.min_count = std::stoull(value);
            else if (key == "vocab_counts") {
                std::istringstream items(value);
                std::string item;
                while (std::getline(items, item, ',')) counts.push_back(std::stoull(item));
            }
        } catch (const std::exception&) {
            throw DataError(fmt::format("invalid model parameter line '{}'", line));
        }
    }
}

std::filesystem::path sidecar(const std::filesystem::path& path, const char* ext) {
    auto p = path;
    p += ext;
    return p;
}

constexpr char kBinaryMagic[8] = {'E', 'M', 'I', 'W', '2', 'V', '0', '1'};

}  // namespace

void save_model(const EmbeddingModel& model, const std::filesystem::path& path, bool binary_sidecar) {
    {
        std::ofstream out(path);
        if (!out) throw DataError(fmt::format("cannot write model '{}'", path.string()));
        fmt::print(out, "{} {}\n", model.size(), model.dim());
        fmt::memory_buffer line;
        for (Eigen::Index i = 0; i < model.size(); ++i) {
            line.clear();
            fmt::format_to(std::back_inserter(line), "{}", model.vocab.word(i));
            for (int j = 0; j < model.dim(); ++j)
                fmt::format_to(std::back_inserter(line), " {:.9g}", model.input(i, j));
            line.push_back('\n');
            out.write(line.data(), static_cast<std::streamsize>(line.size()));
        }
        if (!out) throw DataError(fmt::format("failed writing model '{}'", path.string()));
    }
    {
        std::ofstream out(sidecar(path, ".params"));
        write_params(model.params, out);
        fmt::print(out, "vocab_counts=");
        for (Eigen::Index i = 0; i < model.size(); ++i)
            fmt::print(out, "{}{}", i ? "," : "", model.vocab.count(i));
        fmt::print(out, "\n");
    }
    const auto bin = sidecar(path, ".bin");
    if (binary_sidecar) {
        std::ofstream out(bin, std::ios::binary);
        out.write(kBinaryMagic, sizeof kBinaryMagic);
        const std::int64_t dims[2] = {model.size(), model.dim()};
        out.write(reinterpret_cast<const char*>(dims), sizeof dims);
        const auto bytes = static_cast<std::streamsize>(sizeof(float) * model.input.size());
        out.write(reinterpret_cast<const char*>(model.input.data()), bytes);
        out.write(reinterpret_cast<const char*>(model.output.data()), bytes);
    } else {
        std::filesystem::remove(bin);
    }
}

EmbeddingModel read_text_model(std::istream& in) {
    EmbeddingModel model;
    std::string header;
    if (!std::getline(in, header)) throw ModelParseError(Kind::MalformedHeader, "empty model file");
    std::istringstream hs(header);
    long long V = -1, d = -1;
    std::string extra;
    if (!(hs >> V >> d) || (hs >> extra) || V < 0 || d <= 0)
        throw ModelParseError(Kind::MalformedHeader, fmt::format("malformed model header '{}'", header));

    model.input.resize(V, d);
    std::string line;
    std::unordered_set<std::string> seen;
    for (long long i = 0; i < V; ++i) {
        if (!std::getline(in, line))
            throw ModelParseError(Kind::TruncatedFile,
                                  fmt::format("model file truncated: header declares {} rows, found {}", V, i));
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word))
            throw ModelParseError(Kind::MalformedRow, fmt::format("empty model row {}", i + 1));
        if (!seen.insert(word).second)
            throw ModelParseError(Kind::DuplicateWord, fmt::format("duplicate word '{}' in model", word));
        long long j = 0;
        std::string field;
        while (ls >> field) {
            if (j >= d)
                throw ModelParseError(Kind::DimensionMismatch,
                                      fmt::format("row for '{}' has more than {} values", word, d));
            char* end = nullptr;
            const float value = std::strtof(field.c_str(), &end);
            if (end != field.c_str() + field.size())
                throw ModelParseError(Kind::MalformedRow,
                                      fmt::format("invalid number '{}' for word '{}'", field, word));
            model.input(i, j++) = value;
        }
        if (j != d)
            throw ModelParseError(Kind::DimensionMismatch,
                                  fmt::format("row for '{}' has {} values, expected {}", word, j, d));
        model.vocab.push_back(word, 1);
    }
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            throw ModelParseError(Kind::MalformedRow, "model file has more rows than its header declares");
    model.output = Matrix::Zero(V, d);
    model.params.dim = static_cast<int>(d);
    return model;
}

EmbeddingModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open model '{}'", path.string()));
    EmbeddingModel model = read_text_model(in);

    const auto params_path = sidecar(path, ".params");
    if (std::ifstream ps(params_path); ps) {
        std::vector<std::uint64_t> counts;
        read_params(ps, model.params, counts);
        model.params.dim = model.dim();
        // Restore counts so the vocabulary matches the trained one.
        if (static_cast<Eigen::Index>(counts.size()) == model.size()) {
            Vocabulary vocab;
            for (Eigen::Index i = 0; i < model.size(); ++i)
                vocab.push_back(model.vocab.word(i), counts[static_cast<std::size_t>(i)]);
            model.vocab = std::move(vocab);
        }
    }

    if (std::ifstream bin(sidecar(path, ".bin"), std::ios::binary); bin) {
        char magic[8];
        std::int64_t dims[2];
        bin.read(magic, sizeof magic);
        bin.read(reinterpret_cast<char*>(dims), sizeof dims);
        if (!bin || std::memcmp(magic, kBinaryMagic, sizeof magic) != 0 || dims[0] != model.size() ||
            dims[1] != model.dim())
            throw ModelParseError(Kind::DimensionMismatch, "binary sidecar does not match the text model");
        const auto bytes = static_cast<std::streamsize>(sizeof(float) * model.input.size());
        bin.read(reinterpret_cast<char*>(model.input.data()), bytes);
        bin.read(reinterpret_cast<char*>(model.output.data()), bytes);
        if (!bin) throw ModelParseError(Kind::TruncatedFile, "binary sidecar is truncated");
    }
    return model;
}

}  // namespace emi::embeddings
