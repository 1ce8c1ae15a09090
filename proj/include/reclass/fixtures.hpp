#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "reclass/analysis.hpp"
#include "reclass/estimate.hpp"
#include "reclass/snapshot.hpp"

namespace reclass {

/// Deterministic two-edition fixture with a known add/remove plan. The plan
/// is the oracle: the expected diff tallies are produced while generating.
struct SnapshotPairPlan {
  unsigned seed = 1;
  long long first_year = 1990;
  long long last_year = 2009;
  /// subclass id -> number of families in the earlier edition
  std::vector<std::pair<std::string, long long>> class_sizes;
  double add_rate = 0.05;     ///< planned additions per class = round(rate * size)
  double remove_rate = 0.0;   ///< removals, taken from families that gained a code
  std::string earlier_label = "edition_a";
  std::string later_label = "edition_b";
};

struct SnapshotPairFixture {
  EditionSnapshot earlier;
  EditionSnapshot later;
  std::map<DiffKey, DiffCell> expected;  // exact subclass-level diff
  std::map<std::string, std::pair<double, double>> per_class;  // id -> (positive, negative)
};

SnapshotPairFixture make_snapshot_pair(const SnapshotPairPlan& plan);

/// Two editions whose between-edition additions follow the inverse-lag law:
/// cohort tau receives round(m_tau * beta * sum_j 1/(E+j - tau)) added codes,
/// where E is the first event year after the earlier edition. Feeding the
/// diffed rates to fit_beta recovers beta up to count rounding.
struct ReclassSeriesPlan {
  unsigned seed = 1;
  double beta = 0.4;
  double cohort_growth = 1.05;  ///< families per filing year grow by this factor
  long long first_year = 1990;
  long long earlier_edition_year = 2019;
  int window_size = 3;
  long long base_cohort = 400;  ///< families filed in first_year
  int n_classes = 8;
};

struct ReclassSeriesFixture {
  EditionSnapshot earlier;
  EditionSnapshot later;
  long long first_event_year = 0;
};

ReclassSeriesFixture make_reclass_series(const ReclassSeriesPlan& plan);

/// Classification-count table generated by the exact inverse of the truncated
/// back-correction: cohort counts grow by 1/(1 - beta/k) for the first
/// `depth` lag years and freeze afterwards; each new cohort starts at
/// alpha times the stock of all older cohorts that year. estimate_alpha on
/// this table recovers alpha and w0 exactly.
struct CountTablePlan {
  double alpha = 0.025;
  double beta = 0.4;
  double w0 = 1.25;
  long long first_year = 0;
  long long present_year = 40;
  int depth = 10;
  double initial_count = 100.0;
};

ClassificationCountTable make_count_table(const CountTablePlan& plan);

/// GroupStats with a planted linear effect of w_k on the growth rate:
///   g_k - 1 = intercept + w_slope * w_k + total_slope * log_total + noise.
struct PlantedGroupPlan {
  unsigned seed = 7;
  std::string sections = "ABC";
  int groups_per_section = 80;
  double w_slope = 0.01;
  double total_slope = -0.002;
  double intercept = 0.02;
  double noise_sd = 0.004;
  std::array<long long, 3> recent_years = {2012, 2013, 2014};
};

std::vector<GroupStats> make_planted_group_stats(const PlantedGroupPlan& plan);

}  // namespace reclass
