#include "emi/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <tuple>

#include <fmt/core.h>

#include "emi/errors.hpp"

namespace emi::corpus {

std::string_view to_string(Chamber c) { return c == Chamber::House ? "House" : "Senate"; }

std::string_view to_string(Party p) {
    switch (p) {
    case Party::D: return "D";
    case Party::R: return "R";
    default: return "Other";
    }
}

Chamber parse_chamber(std::string_view s) {
    if (s == "House" || s == "house" || s == "H") return Chamber::House;
    if (s == "Senate" || s == "senate" || s == "S") return Chamber::Senate;
    throw DataError(fmt::format("unknown chamber '{}'", s));
}

Party parse_party(std::string_view s) {
    if (s == "D") return Party::D;
    if (s == "R") return Party::R;
    return Party::Other;
}

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError(fmt::format("invalid {} '{}'", what, s));
    return value;
}

}  // namespace

Date parse_iso_date(std::string_view s) {
    if (auto t = s.find('T'); t != std::string_view::npos) s = s.substr(0, t);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw DataError(fmt::format("invalid ISO-8601 date '{}'", s));
    Date d{parse_int(s.substr(0, 4), "year"), parse_int(s.substr(5, 2), "month"),
           parse_int(s.substr(8, 2), "day")};
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
        throw DataError(fmt::format("invalid ISO-8601 date '{}'", s));
    return d;
}

std::string format_iso_date(const Date& d) {
    return fmt::format("{:04d}-{:02d}-{:02d}", d.year, d.month, d.day);
}

int session_from_year(int year) {
    const int offset = year - 1789;
    return (offset >= 0 ? offset / 2 : (offset - 1) / 2) + 1;
}

int session_start_year(int session) { return 1789 + 2 * (session - 1); }

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open word list '{}'", path.string()));
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        std::string entry = line.substr(first, last - first + 1);
        std::transform(entry.begin(), entry.end(), entry.begin(), [](unsigned char c) {
            return static_cast<char>(c < 0x80 ? std::tolower(c) : c);
        });
        words.push_back(std::move(entry));
    }
    return words;
}

WordSet load_word_set(const std::filesystem::path& path) {
    auto words = read_word_list(path);
    return WordSet(words.begin(), words.end());
}

namespace {

struct CodePoint {
    char32_t value;
    std::size_t length;
};

CodePoint decode(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    auto cont = [&](std::size_t i) -> int {
        if (pos + i >= s.size()) return -1;
        auto b = static_cast<unsigned char>(s[pos + i]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80) return {b0, 1};
    if ((b0 & 0xE0) == 0xC0) {
        int c1 = cont(1);
        if (c1 >= 0) return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
    } else if ((b0 & 0xF0) == 0xE0) {
        int c1 = cont(1), c2 = cont(2);
        if (c1 >= 0 && c2 >= 0)
            return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
    } else if ((b0 & 0xF8) == 0xF0) {
        int c1 = cont(1), c2 = cont(2), c3 = cont(3);
        if (c1 >= 0 && c2 >= 0 && c3 >= 0)
            return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
    }
    // Stray byte: treat as an opaque one-byte symbol.
    return {0xFFFD, 1};
}

bool is_space(char32_t c) {
    switch (c) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return c >= 0x2000 && c <= 0x200A;
    }
}

bool is_punct(char32_t c) {
    if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
    switch (c) {
    case 0xA1: case 0xAB: case 0xB7: case 0xBB: case 0xBF: case 0x3001: case 0x3002:
        return true;
    default:
        return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E);
    }
}

void append_lower(std::string& out, std::string_view bytes, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    } else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7 && bytes.size() == 2) {
        const char32_t lower = cp + 0x20;
        out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
        out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
    } else {
        out.append(bytes);
    }
}

std::string normalize_token(std::string_view raw) {
    // Code point boundaries of the raw token.
    std::vector<CodePoint> cps;
    std::vector<std::size_t> offsets;
    for (std::size_t pos = 0; pos < raw.size();) {
        auto cp = decode(raw, pos);
        cps.push_back(cp);
        offsets.push_back(pos);
        pos += cp.length;
    }
    std::size_t first = 0, last = cps.size();
    while (first < last && is_punct(cps[first].value)) ++first;
    while (last > first && is_punct(cps[last - 1].value)) --last;
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = first; i < last; ++i)
        append_lower(out, raw.substr(offsets[i], cps[i].length), cps[i].value);
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t start = std::string_view::npos;
    auto flush = [&](std::size_t end) {
        if (start == std::string_view::npos) return;
        auto token = normalize_token(text.substr(start, end - start));
        if (!token.empty()) tokens.push_back(std::move(token));
        start = std::string_view::npos;
    };
    for (std::size_t pos = 0; pos < text.size();) {
        auto cp = decode(text, pos);
        if (is_space(cp.value)) {
            flush(pos);
        } else if (start == std::string_view::npos) {
            start = pos;
        }
        pos += cp.length;
    }
    flush(text.size());
    return tokens;
}

TokenizedSpeech tokenize(const SpeechRecord& record) {
    return TokenizedSpeech{record.speech_id, tokenize(record.text)};
}

double common_word_ratio(const TokenizedSpeech& speech, const WordSet& common_words) {
    if (speech.token_count() == 0)
        throw UndefinedRatioError(
            fmt::format("common-word ratio undefined for empty speech '{}'", speech.speech_id));
    const auto hits = std::count_if(speech.tokens.begin(), speech.tokens.end(),
                                    [&](const std::string& t) { return common_words.contains(t); });
    return static_cast<double>(hits) / static_cast<double>(speech.token_count());
}

std::string_view to_string(RejectReason r) {
    switch (r) {
    case RejectReason::TooShort: return "too_short";
    case RejectReason::LowRatio: return "low_ratio";
    case RejectReason::NonMajorParty: return "non_major_party";
    case RejectReason::Duplicate: return "duplicate";
    case RejectReason::Procedural: return "procedural";
    }
    return "unknown";
}

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

}  // namespace

FilterResult filter_speeches(std::span<const SpeechRecord> records, const WordSet& common_words,
                             const FilterOptions& options) {
    const std::size_t n = records.size();
    std::vector<std::optional<RejectReason>> reason(n);
    std::vector<std::string> normalized(n);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = records[i];
        if (rec.is_procedural) {
            reason[i] = RejectReason::Procedural;
            continue;
        }
        auto speech = tokenize(rec);
        if (speech.token_count() < options.min_tokens || speech.token_count() == 0) {
            reason[i] = RejectReason::TooShort;
        } else if (common_word_ratio(speech, common_words) < options.threshold) {
            reason[i] = RejectReason::LowRatio;
        } else if (rec.party != Party::D && rec.party != Party::R) {
            reason[i] = RejectReason::NonMajorParty;
        } else {
            normalized[i] = join_tokens(speech.tokens);
        }
    }

    // Earliest surviving record per normalized text wins.
    std::map<std::string_view, std::size_t> first_seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (reason[i]) continue;
        auto [it, inserted] = first_seen.try_emplace(normalized[i], i);
        if (inserted) continue;
        const std::size_t j = it->second;
        if (std::tie(records[i].date, i) < std::tie(records[j].date, j)) {
            reason[j] = RejectReason::Duplicate;
            it->second = i;
        } else {
            reason[i] = RejectReason::Duplicate;
        }
    }

    FilterResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (reason[i])
            result.rejected.push_back({records[i].speech_id, *reason[i]});
        else
            result.kept.push_back(records[i]);
    }
    return result;
}

std::vector<std::size_t> chunk_lengths(std::size_t n_tokens, const ChunkOptions& options) {
    if (options.target == 0) throw std::invalid_argument("chunk target must be positive");
    if (n_tokens == 0) return {};
    if (n_tokens <= options.target) return {n_tokens};
    std::vector<std::size_t> sizes(n_tokens / options.target, options.target);
    const std::size_t remainder = n_tokens % options.target;
    if (remainder == 0) return sizes;
    if (remainder < options.min_size)
        sizes.back() += remainder;
    else
        sizes.push_back(remainder);
    return sizes;
}

std::vector<Chunk> chunk_speech(const SpeechRecord& record, const TokenizedSpeech& speech,
                                const ChunkOptions& options) {
    std::vector<Chunk> chunks;
    std::size_t offset = 0;
    std::size_t ordinal = 0;
    for (std::size_t len : chunk_lengths(speech.token_count(), options)) {
        Chunk c;
        c.chunk_id = fmt::format("{}#{}", record.speech_id, ordinal++);
        c.speech_id = record.speech_id;
        c.tokens.assign(speech.tokens.begin() + static_cast<std::ptrdiff_t>(offset),
                        speech.tokens.begin() + static_cast<std::ptrdiff_t>(offset + len));
        c.session = record.session;
        c.party = record.party;
        c.chamber = record.chamber;
        offset += len;
        chunks.push_back(std::move(c));
    }
    return chunks;
}

}  // namespace emi::corpus
