#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace emi::corpus {

enum class Chamber { House, Senate };
enum class Party { D, R, Other };

std::string_view to_string(Chamber c);
std::string_view to_string(Party p);
Chamber parse_chamber(std::string_view s);
Party parse_party(std::string_view s);

struct Date {
    int year = 0;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

// Accepts YYYY-MM-DD (a trailing time component is ignored).
Date parse_iso_date(std::string_view s);
std::string format_iso_date(const Date& d);

// Congress number of the two-year session starting in an odd year: 1789 -> 1, 1975 -> 94.
int session_from_year(int year);
int session_start_year(int session);

struct SpeechRecord {
    std::string speech_id;
    Date date;
    int session = 0;
    Chamber chamber = Chamber::House;
    Party party = Party::Other;
    std::string speaker;
    std::string text;
    bool is_procedural = false;
};

struct TokenizedSpeech {
    std::string speech_id;
    std::vector<std::string> tokens;

    std::size_t token_count() const { return tokens.size(); }
};

struct Chunk {
    std::string chunk_id;
    std::string speech_id;
    std::vector<std::string> tokens;
    int session = 0;
    Party party = Party::Other;
    Chamber chamber = Chamber::House;

    std::size_t length() const { return tokens.size(); }
};

using WordSet = std::unordered_set<std::string>;

// One entry per non-empty line; '#' starts a comment line. Entries are lowercased.
std::vector<std::string> read_word_list(const std::filesystem::path& path);
WordSet load_word_set(const std::filesystem::path& path);

/// Canonical tokenizer shared by every stage: split on Unicode whitespace,
/// strip leading/trailing punctuation, lowercase ASCII and Latin-1 letters, drop empties.
std::vector<std::string> tokenize(std::string_view text);
TokenizedSpeech tokenize(const SpeechRecord& record);

// Fraction of tokens found in `common_words`. Throws UndefinedRatioError on an empty speech.
double common_word_ratio(const TokenizedSpeech& speech, const WordSet& common_words);

enum class RejectReason { TooShort, LowRatio, NonMajorParty, Duplicate, Procedural };
std::string_view to_string(RejectReason r);

struct Rejection {
    std::string speech_id;
    RejectReason reason;
};

struct FilterOptions {
    double threshold = 0.05;
    std::size_t min_tokens = 11;
};

struct FilterResult {
    std::vector<SpeechRecord> kept;
    std::vector<Rejection> rejected;
};

// Checks are applied in the order procedural, too_short, low_ratio,
// non_major_party, duplicate; a record gets the first reason that applies.
// Among records passing every other check, the earliest by (date, input
// position) of each normalized text is kept. Kept records preserve input order.
FilterResult filter_speeches(std::span<const SpeechRecord> records, const WordSet& common_words,
                             const FilterOptions& options = {});

struct ChunkOptions {
    std::size_t target = 150;
    std::size_t min_size = 50;
};

// Chunk sizes for a speech of `n_tokens` tokens.
std::vector<std::size_t> chunk_lengths(std::size_t n_tokens, const ChunkOptions& options = {});

std::vector<Chunk> chunk_speech(const SpeechRecord& record, const TokenizedSpeech& speech,
                                const ChunkOptions& options = {});

}  // namespace emi::corpus
