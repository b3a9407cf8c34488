#include "emi/corpus_io.hpp"

#include <fstream>
#include <istream>

#include <fmt/core.h>
#include <json.hpp>

#include "emi/errors.hpp"

namespace emi::corpus {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(fmt::format("missing field '{}'", key));
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) throw DataError(fmt::format("field '{}' must be a string", key));
    return v.get<std::string>();
}

json parse_object(std::string_view line) {
    json obj = json::parse(line.begin(), line.end(), nullptr, false);
    if (obj.is_discarded()) throw DataError("invalid JSON");
    if (!obj.is_object()) throw DataError("JSON value is not an object");
    return obj;
}

}  // namespace

SpeechRecord parse_speech_json(std::string_view line) {
    const json obj = parse_object(line);
    SpeechRecord rec;
    rec.speech_id = require_string(obj, "speech_id");
    if (rec.speech_id.empty()) throw DataError("empty speech_id");
    rec.date = parse_iso_date(require_string(obj, "date"));
    if (auto it = obj.find("session"); it != obj.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw DataError("field 'session' must be an integer");
        rec.session = it->get<int>();
    } else {
        rec.session = session_from_year(rec.date.year);
    }
    rec.chamber = parse_chamber(require_string(obj, "chamber"));
    rec.party = parse_party(require_string(obj, "party"));
    rec.speaker = require_string(obj, "speaker");
    rec.text = require_string(obj, "text");
    if (rec.text.empty()) throw DataError("empty text");
    if (auto it = obj.find("is_procedural"); it != obj.end() && !it->is_null()) {
        if (!it->is_boolean()) throw DataError("field 'is_procedural' must be a boolean");
        rec.is_procedural = it->get<bool>();
    }
    return rec;
}

std::string speech_to_json(const SpeechRecord& record) {
    json obj = {{"speech_id", record.speech_id},
                {"date", format_iso_date(record.date)},
                {"session", record.session},
                {"chamber", to_string(record.chamber)},
                {"party", to_string(record.party)},
                {"speaker", record.speaker},
                {"text", record.text},
                {"is_procedural", record.is_procedural}};
    return obj.dump();
}

SpeechReadResult read_speeches(std::istream& in) {
    SpeechReadResult result;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++result.n_lines;
        try {
            result.records.push_back(parse_speech_json(line));
        } catch (const DataError& e) {
            result.malformed.push_back({line_number, e.what()});
        } catch (const json::exception& e) {
            result.malformed.push_back({line_number, e.what()});
        }
    }
    return result;
}

SpeechReadResult read_speeches(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open corpus '{}'", path.string()));
    return read_speeches(in);
}

std::string chunk_to_json(const Chunk& chunk) {
    json obj = {{"chunk_id", chunk.chunk_id},
                {"speech_id", chunk.speech_id},
                {"session", chunk.session},
                {"party", to_string(chunk.party)},
                {"chamber", to_string(chunk.chamber)},
                {"length", chunk.length()},
                {"tokens", chunk.tokens}};
    return obj.dump();
}

Chunk parse_chunk_json(std::string_view line) {
    const json obj = parse_object(line);
    Chunk c;
    c.chunk_id = require_string(obj, "chunk_id");
    c.speech_id = require_string(obj, "speech_id");
    const auto& session = require(obj, "session");
    if (!session.is_number_integer()) throw DataError("field 'session' must be an integer");
    c.session = session.get<int>();
    c.party = parse_party(require_string(obj, "party"));
    c.chamber = parse_chamber(require_string(obj, "chamber"));
    const auto& tokens = require(obj, "tokens");
    if (!tokens.is_array()) throw DataError("field 'tokens' must be an array");
    c.tokens = tokens.get<std::vector<std::string>>();
    return c;
}

std::vector<Chunk> read_chunks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open chunk file '{}'", path.string()));
    std::vector<Chunk> chunks;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            chunks.push_back(parse_chunk_json(line));
        } catch (const DataError& e) {
            throw DataError(fmt::format("{}:{}: {}", path.string(), line_number, e.what()));
        } catch (const json::exception& e) {
            throw DataError(fmt::format("{}:{}: {}", path.string(), line_number, e.what()));
        }
    }
    return chunks;
}

}  // namespace emi::corpus
