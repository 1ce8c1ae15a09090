#include "reclass/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "reclass/errors.hpp"

namespace reclass {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

CsvTable read_csv(const std::filesystem::path& path, char delim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      table.header = split(line, delim);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    table.rows.push_back(split(line, delim));
  }
  if (first) table.header = {};  // empty file: no header, no rows
  return table;
}

std::string to_csv_text(const CsvTable& table, char delim) {
  std::ostringstream out;
  const auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << delim;
      out << row[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("to_csv_text: row width differs from header");
    emit(row);
  }
  return out.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

long long parse_year(const std::string& field) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::invalid_argument("not a year: '" + field + "'");
  return value;
}

double parse_real(const std::string& field) {
  if (field.empty()) throw std::invalid_argument("empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (errno != 0 || end != field.c_str() + field.size())
    throw std::invalid_argument("not a number: '" + field + "'");
  return value;
}

}  // namespace reclass
