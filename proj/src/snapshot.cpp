#include "reclass/snapshot.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "reclass/csv.hpp"
#include "reclass/errors.hpp"

namespace reclass {

std::string_view to_string(ClassLevel level) {
  switch (level) {
    case ClassLevel::section: return "section";
    case ClassLevel::subclass: return "subclass";
    case ClassLevel::main_group: return "maingroup";
  }
  return "?";
}

ClassLevel class_level_from_string(std::string_view name) {
  if (name == "section") return ClassLevel::section;
  if (name == "subclass") return ClassLevel::subclass;
  if (name == "maingroup" || name == "main_group") return ClassLevel::main_group;
  throw std::invalid_argument("unknown class level: '" + std::string(name) + "'");
}

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// letter, two digits, letter, then optional digits and optional "/digits".
bool well_formed_code(std::string_view code) {
  if (code.size() < 4) return false;
  if (!is_upper(code[0]) || !is_digit(code[1]) || !is_digit(code[2]) || !is_upper(code[3]))
    return false;
  std::size_t i = 4;
  while (i < code.size() && is_digit(code[i])) ++i;
  if (i == code.size()) return true;
  if (code[i] != '/' || i == 4) return false;  // a subdivision needs a group number
  ++i;
  if (i == code.size()) return false;
  while (i < code.size() && is_digit(code[i])) ++i;
  return i == code.size();
}

}  // namespace

std::string truncate_code(std::string_view code, ClassLevel level) {
  if (!well_formed_code(code))
    throw std::invalid_argument("malformed classification code: '" + std::string(code) + "'");
  switch (level) {
    case ClassLevel::section: return std::string(code.substr(0, 1));
    case ClassLevel::subclass: return std::string(code.substr(0, 4));
    case ClassLevel::main_group: return std::string(code.substr(0, code.find('/')));
  }
  throw std::invalid_argument("truncate_code: bad level");
}

EditionSnapshot load_snapshot(const std::filesystem::path& path, const SnapshotFilter& filter,
                              LoadReport* report) {
  const CsvTable table = read_csv(path);
  LoadReport local;
  LoadReport& rep = report ? *report : local;

  int col_id = -1, col_year = -1, col_codes = -1;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "family_id") col_id = static_cast<int>(i);
    if (table.header[i] == "filing_year") col_year = static_cast<int>(i);
    if (table.header[i] == "codes") col_codes = static_cast<int>(i);
  }
  if (!table.header.empty() && (col_id < 0 || col_year < 0 || col_codes < 0))
    throw IoError(path.string() + ": header must name family_id, filing_year, codes");

  EditionSnapshot snapshot;
  snapshot.label = path.stem().string();
  long long row_no = 1;  // header is row 1
  for (const auto& row : table.rows) {
    ++row_no;
    ++rep.rows;
    const auto reject = [&](const std::string& why) {
      std::ostringstream msg;
      msg << "row " << row_no << ": " << why;
      rep.issues.push_back(msg.str());
    };
    if (row.size() != table.header.size()) {
      reject("expected " + std::to_string(table.header.size()) + " columns");
      continue;
    }
    const std::string& family = row[col_id];
    if (family.empty()) {
      reject("empty family_id");
      continue;
    }
    long long year = 0;
    try {
      year = parse_year(row[col_year]);
    } catch (const std::invalid_argument&) {
      reject("family " + family + " has no usable filing year");
      continue;
    }
    std::set<std::string> codes;
    for (const auto& code : split(row[col_codes], ';')) {
      if (!code.empty()) codes.insert(code);
    }
    if (codes.empty() && !filter.allow_empty_codes) {
      reject("family " + family + " lists no codes");
      continue;
    }
    if ((filter.min_filing_year && year < *filter.min_filing_year) ||
        (filter.max_filing_year && year > *filter.max_filing_year)) {
      ++rep.filtered_by_year;
      continue;
    }
    auto [it, inserted] = snapshot.records.try_emplace(family, FamilyRecord{year, codes});
    if (!inserted) {
      ++rep.merged_duplicates;
      it->second.codes.insert(codes.begin(), codes.end());
      it->second.filing_year = std::min(it->second.filing_year, year);
    }
  }
  return snapshot;
}

std::map<std::string, std::string> read_edition_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> editions;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw IoError(path.string() + ": expected label=path, got '" + line + "'");
    editions[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return editions;
}

namespace {

std::set<std::string> truncated_set(const std::set<std::string>& codes, ClassLevel level) {
  std::set<std::string> out;
  for (const auto& code : codes) out.insert(truncate_code(code, level));
  return out;
}

}  // namespace

DiffResult diff(const EditionSnapshot& earlier, const EditionSnapshot& later, ClassLevel level) {
  DiffResult result;
  result.level = level;
  result.earlier_label = earlier.label;
  result.later_label = later.label;
  for (const auto& [family, before] : earlier.records) {
    const auto after_it = later.records.find(family);
    if (after_it == later.records.end()) continue;  // new or vanished families are not reclassifications
    const std::set<std::string> before_ids = truncated_set(before.codes, level);
    const std::set<std::string> after_ids = truncated_set(after_it->second.codes, level);
    const long long year = before.filing_year;
    for (const auto& id : before_ids) {
      result.cells[{id, year}].baseline += 1.0;
      if (!after_ids.contains(id)) result.cells[{id, year}].negative += 1.0;
    }
    for (const auto& id : after_ids) {
      if (!before_ids.contains(id)) result.cells[{id, year}].positive += 1.0;
    }
  }
  return result;
}

NetRates net_rates_by_filing_year(const DiffResult& result, long long first_event_year,
                                  int window_size) {
  if (window_size < 1) throw std::invalid_argument("net_rates_by_filing_year: window_size >= 1");
  std::map<long long, DiffCell> by_year;
  for (const auto& [key, cell] : result.cells) {
    auto& agg = by_year[key.filing_year];
    agg.positive += cell.positive;
    agg.negative += cell.negative;
    agg.baseline += cell.baseline;
  }
  NetRates rates;
  for (const auto& [year, cell] : by_year) {
    if (cell.baseline <= 0.0) {
      rates.skipped_zero_baseline.push_back(year);
      continue;
    }
    if (year >= first_event_year)
      throw std::invalid_argument("net_rates_by_filing_year: filing year inside the event window");
    rates.stream.records.push_back(
        {year, first_event_year, cell.positive - cell.negative, cell.baseline});
  }
  return rates;
}

std::vector<ClassSizeRow> reclass_vs_size(const DiffResult& result,
                                          const EditionSnapshot& earlier, ClassLevel level) {
  std::map<std::string, ClassSizeRow> rows;
  for (const auto& [family, record] : earlier.records) {
    for (const auto& id : truncated_set(record.codes, level)) {
      auto& row = rows[id];
      row.class_id = id;
      row.size += 1;
    }
  }
  for (const auto& [key, cell] : result.cells) {
    auto& row = rows[key.class_id];
    row.class_id = key.class_id;
    row.positive += cell.positive;
    row.negative += cell.negative;
  }
  std::vector<ClassSizeRow> out;
  out.reserve(rows.size());
  for (auto& [id, row] : rows) out.push_back(std::move(row));
  return out;
}

}  // namespace reclass
