#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reclass/simulate.hpp"

namespace reclass {

/// CPC aggregation levels: section is the first character, subclass the first
/// four, main group everything before a "/" subdivision.
enum class ClassLevel { section, subclass, main_group };

std::string_view to_string(ClassLevel level);
ClassLevel class_level_from_string(std::string_view name);

/// Prefix of a classification code at the requested level. The code must have
/// the CPC lexical shape: letter, two digits, letter, then an optional digit
/// group and optional "/" subdivision (e.g. "H01L21/02").
std::string truncate_code(std::string_view code, ClassLevel level);

struct FamilyRecord {
  long long filing_year = 0;
  std::set<std::string> codes;
  bool operator==(const FamilyRecord&) const = default;
};

/// One edition's classification state: family id -> (filing year, codes).
struct EditionSnapshot {
  std::string label;
  std::map<std::string, FamilyRecord> records;
};

struct SnapshotFilter {
  std::optional<long long> min_filing_year;
  std::optional<long long> max_filing_year;
  /// Families whose code list is empty are normally reported as malformed.
  bool allow_empty_codes = false;
};

struct LoadReport {
  long long rows = 0;
  long long merged_duplicates = 0;
  long long filtered_by_year = 0;
  std::vector<std::string> issues;  // one diagnostic per rejected row
};

/// Reads an edition from a CSV with columns family_id, filing_year, codes
/// (codes separated by ';'). Duplicate family rows merge by set union and
/// keep the earliest filing year. Rejected rows are reported, not fatal.
/// Jurisdiction filtering (>= 1 US and >= 1 non-US application) is an
/// upstream extraction concern; inputs are assumed already filtered.
EditionSnapshot load_snapshot(const std::filesystem::path& path, const SnapshotFilter& filter = {},
                              LoadReport* report = nullptr);

/// Edition label -> file path, from a key-value file of "label=path" lines.
std::map<std::string, std::string> read_edition_manifest(const std::filesystem::path& path);

struct DiffKey {
  std::string class_id;
  long long filing_year = 0;
  auto operator<=>(const DiffKey&) const = default;
};

struct DiffCell {
  double positive = 0.0;  ///< class ids gained by families present in both editions
  double negative = 0.0;  ///< class ids lost
  double baseline = 0.0;  ///< classifications present in the earlier edition
};

struct DiffResult {
  ClassLevel level = ClassLevel::subclass;
  std::string earlier_label;
  std::string later_label;
  std::map<DiffKey, DiffCell> cells;
};

/// Per (class, filing year) reclassification tallies between two editions.
/// Only families present in both editions contribute; codes are truncated to
/// the level and de-duplicated per family, so a family counts at most once
/// per class. Filing years come from the earlier edition.
DiffResult diff(const EditionSnapshot& earlier, const EditionSnapshot& later, ClassLevel level);

struct NetRates {
  ReclassEventStream stream;
  std::vector<long long> skipped_zero_baseline;
};

/// Collapses a diff into per-filing-year net rates: (positive - negative)
/// summed across classes over the baseline classification count of that
/// filing year, packaged as fit_beta samples for the window whose first event
/// year is given. Every filing year must precede the window.
NetRates net_rates_by_filing_year(const DiffResult& result, long long first_event_year,
                                  int window_size = 3);

struct ClassSizeRow {
  std::string class_id;
  long long size = 0;  ///< distinct families of the class in the earlier edition
  double positive = 0.0;
  double negative = 0.0;
};

/// Per-class reclassification totals against class size, for log-log slope
/// analysis. One row per class seen in the earlier edition or the diff.
std::vector<ClassSizeRow> reclass_vs_size(const DiffResult& result,
                                          const EditionSnapshot& earlier, ClassLevel level);

}  // namespace reclass
