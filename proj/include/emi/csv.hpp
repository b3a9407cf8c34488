#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emi::csv {

// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(std::string_view line);
// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column position by name; throws MissingColumnError.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

Table read(std::istream& in);
Table read(const std::filesystem::path& path);

// Parses a real; empty, "NA", "NaN" and "nan" become NaN. Throws DataError otherwise.
double parse_real(std::string_view field);

}  // namespace emi::csv
