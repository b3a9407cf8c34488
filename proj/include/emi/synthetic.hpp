#pragma once

// Generators for synthetic corpora with a known evidence/intuition structure.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emi/corpus.hpp"

namespace emi::synthetic {

// `n` distinct pronounceable filler words ("kalomi", ...) avoiding `reserved`.
std::vector<std::string> filler_words(std::size_t n, const corpus::WordSet& reserved);

// Single-word entries of a dictionary (phrases are skipped).
std::vector<std::string> single_words(std::span<const std::string> entries);

struct ChunkCorpusOptions {
    std::size_t n_chunks = 2000;
    std::size_t min_length = 50;
    std::size_t max_length = 200;
    double filler_share = 0.5;
    std::size_t n_filler = 400;
    std::uint64_t seed = 1;
};

struct LabeledChunks {
    std::vector<corpus::Chunk> chunks;
    std::vector<int> labels;  // 1: drawn from the evidence vocabulary, 0: intuition
};

// Half the chunks draw their non-filler tokens from `evidence`, half from
// `intuition`; each token is a shared filler word with probability filler_share.
LabeledChunks construct_chunks(std::span<const std::string> evidence, std::span<const std::string> intuition,
                               const ChunkCorpusOptions& opts = {});

struct SpeechCorpusOptions {
    std::size_t n_speeches = 500;
    int first_year = 1873;
    int last_year = 2016;
    int peak_year = 1975;
    std::size_t n_filler = 300;
    std::uint64_t seed = 7;
};

// Congressional-style speeches whose evidence share rises to peak_year and then
// falls, slightly higher for D than R. About 3% procedural, 2% too short,
// 2% duplicates and 4% third-party speakers are mixed in for the filter.
std::vector<corpus::SpeechRecord> speech_corpus(std::span<const std::string> evidence,
                                                std::span<const std::string> intuition,
                                                std::span<const std::string> common_words,
                                                const SpeechCorpusOptions& opts = {});

}  // namespace emi::synthetic
