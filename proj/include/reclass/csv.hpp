#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace reclass {

/// Stable shortest-ish formatting used for every number the tool writes, so
/// identical inputs always produce byte-identical files.
std::string format_double(double v);

std::vector<std::string> split(std::string_view line, char delim);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a delimited file with a header row. CR line endings are stripped.
CsvTable read_csv(const std::filesystem::path& path, char delim = ',');

/// Serializes a table; every row must match the header width.
std::string to_csv_text(const CsvTable& table, char delim = ',');

/// Writes text through a temporary file and renames it into place, so readers
/// never observe partial output.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

long long parse_year(const std::string& field);
double parse_real(const std::string& field);

}  // namespace reclass
