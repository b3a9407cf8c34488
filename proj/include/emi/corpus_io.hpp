#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "emi/corpus.hpp"

namespace emi::corpus {

// Parses one JSON object with the SpeechRecord fields. `session` is optional and
// derived from the date when absent; `is_procedural` is optional. Throws DataError.
SpeechRecord parse_speech_json(std::string_view line);
std::string speech_to_json(const SpeechRecord& record);

struct MalformedLine {
    std::size_t line_number;  // 1-based
    std::string message;
};

struct SpeechReadResult {
    std::vector<SpeechRecord> records;
    std::vector<MalformedLine> malformed;
    std::size_t n_lines = 0;  // non-blank lines seen
};

// Reads a JSON-lines corpus, collecting malformed rows instead of failing.
SpeechReadResult read_speeches(std::istream& in);
SpeechReadResult read_speeches(const std::filesystem::path& path);

std::string chunk_to_json(const Chunk& chunk);
Chunk parse_chunk_json(std::string_view line);
std::vector<Chunk> read_chunks(const std::filesystem::path& path);

}  // namespace emi::corpus
