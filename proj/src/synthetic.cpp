#include "emi/synthetic.hpp"

#include <algorithm>
#include <array>
#include <random>

#include <fmt/core.h>

namespace emi::synthetic {

std::vector<std::string> filler_words(std::size_t n, const corpus::WordSet& reserved) {
    static constexpr std::array<std::string_view, 24> syllables{"ka", "lo", "mi", "ru", "te", "sa", "vo", "ne",
                                                                "pi", "da", "ko", "zu", "re", "ba", "fi", "go",
                                                                "tu", "le", "mo", "xi", "wa", "ye", "hu", "qe"};
    constexpr std::size_t S = syllables.size();
    std::vector<std::string> out;
    corpus::WordSet seen;
    for (std::size_t i = 0; out.size() < n; ++i) {
        if (i >= S * S * S) throw std::invalid_argument("too many filler words requested");
        std::string w = std::string(syllables[i % S]) + std::string(syllables[(i / S) % S]) +
                        std::string(syllables[(i / (S * S)) % S]);
        if (reserved.contains(w) || !seen.insert(w).second) continue;
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<std::string> single_words(std::span<const std::string> entries) {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.find(' ') == std::string::npos) out.push_back(e);
    return out;
}

LabeledChunks construct_chunks(std::span<const std::string> evidence, std::span<const std::string> intuition,
                               const ChunkCorpusOptions& opts) {
    if (evidence.empty() || intuition.empty()) throw std::invalid_argument("construct vocabularies must be non-empty");
    if (opts.min_length == 0 || opts.min_length > opts.max_length) throw std::invalid_argument("bad chunk lengths");
    corpus::WordSet reserved(evidence.begin(), evidence.end());
    reserved.insert(intuition.begin(), intuition.end());
    const auto filler = filler_words(opts.n_filler, reserved);

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> length(opts.min_length, opts.max_length);
    std::uniform_int_distribution<std::size_t> pick_filler(0, filler.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_e(0, evidence.size() - 1), pick_i(0, intuition.size() - 1);
    std::bernoulli_distribution is_filler(opts.filler_share);

    LabeledChunks out;
    for (std::size_t c = 0; c < opts.n_chunks; ++c) {
        const int label = c % 2 == 0 ? 1 : 0;
        corpus::Chunk chunk;
        chunk.speech_id = fmt::format("synthetic-{}", c);
        chunk.chunk_id = chunk.speech_id + "#0";
        chunk.session = 94;
        chunk.party = label == 1 ? corpus::Party::D : corpus::Party::R;
        const std::size_t n = length(rng);
        for (std::size_t k = 0; k < n; ++k) {
            if (is_filler(rng))
                chunk.tokens.push_back(filler[pick_filler(rng)]);
            else
                chunk.tokens.push_back(label == 1 ? evidence[pick_e(rng)] : intuition[pick_i(rng)]);
        }
        out.chunks.push_back(std::move(chunk));
        out.labels.push_back(label);
    }
    return out;
}

std::vector<corpus::SpeechRecord> speech_corpus(std::span<const std::string> evidence,
                                                std::span<const std::string> intuition,
                                                std::span<const std::string> common_words,
                                                const SpeechCorpusOptions& opts) {
    if (evidence.empty() || intuition.empty() || common_words.empty())
        throw std::invalid_argument("word lists must be non-empty");
    if (opts.first_year >= opts.last_year || opts.peak_year < opts.first_year || opts.peak_year > opts.last_year)
        throw std::invalid_argument("bad year range");
    corpus::WordSet reserved(evidence.begin(), evidence.end());
    reserved.insert(intuition.begin(), intuition.end());
    reserved.insert(common_words.begin(), common_words.end());
    const auto filler = filler_words(opts.n_filler, reserved);

    auto evidence_share = [&](int year) {
        if (year <= opts.peak_year)
            return 0.40 + 0.30 * (year - opts.first_year) / static_cast<double>(opts.peak_year - opts.first_year);
        return 0.70 - 0.40 * (year - opts.peak_year) / static_cast<double>(opts.last_year - opts.peak_year);
    };

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> year_dist(opts.first_year, opts.last_year);
    std::uniform_int_distribution<int> month_dist(1, 12), day_dist(1, 28);
    std::uniform_int_distribution<std::size_t> length_dist(20, 450);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](std::span<const std::string> words) {
        return words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
    };
    static constexpr std::array<std::string_view, 8> surnames{"ADAMS", "BAKER", "CLARK", "DAVIS",
                                                              "EVANS", "FOSTER", "GRANT", "HAYES"};

    std::vector<corpus::SpeechRecord> out;
    for (std::size_t s = 0; s < opts.n_speeches; ++s) {
        corpus::SpeechRecord r;
        r.speech_id = fmt::format("syn{:04}", s);
        r.date = {year_dist(rng), month_dist(rng), day_dist(rng)};
        r.session = corpus::session_from_year(r.date.year);
        r.chamber = u(rng) < 0.55 ? corpus::Chamber::House : corpus::Chamber::Senate;
        const double party_draw = u(rng);
        r.party = party_draw < 0.48 ? corpus::Party::D : party_draw < 0.96 ? corpus::Party::R : corpus::Party::Other;
        r.speaker = fmt::format("Mr. {}", surnames[s % surnames.size()]);

        const double kind = u(rng);
        if (kind < 0.03) {
            r.is_procedural = true;
            r.text = "The clerk will call the roll.";
        } else if (kind < 0.05) {
            r.text = "I yield back the balance of my time.";
        } else if (kind < 0.07 && !out.empty()) {
            r.text = out[static_cast<std::size_t>(u(rng) * static_cast<double>(out.size()))].text;
        } else {
            const double p_e = std::clamp(evidence_share(r.date.year) + (r.party == corpus::Party::D ? 0.04 : -0.04),
                                          0.0, 1.0);
            const std::size_t n = length_dist(rng);
            std::string text;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = u(rng);
                std::string_view w;
                if (d < 0.35)
                    w = pick(common_words);
                else if (d < 0.65)
                    w = pick(filler);
                else
                    w = u(rng) < p_e ? pick(evidence) : pick(intuition);
                if (!text.empty()) text += (k % 12 == 0) ? ". " : " ";
                text += w;
            }
            text += ".";
            text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
            r.text = std::move(text);
        }
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
    return out;
}

}  // namespace emi::synthetic
