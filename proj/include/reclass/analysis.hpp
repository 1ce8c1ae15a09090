#pragma once

#include <Eigen/Core>
#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reclass/estimate.hpp"
#include "reclass/snapshot.hpp"

namespace reclass {

/// Per-class, per-year tallies. For a family carrying m distinct class ids at
/// the panel's level, each of its classes gains one member, 1/m fractional
/// member, and m carried codes; the carried-codes series feeds the
/// classifications-per-patent measures. A class's yearly classification count
/// equals its member count (one classification per family per class), so the
/// classification and unique growth series coincide below; the distinction
/// matters for the whole-panel aggregate, where classifications count every
/// membership and unique patents count each family once.
struct PanelCell {
  double members = 0.0;
  double fractional = 0.0;
  double carried_codes = 0.0;
};

struct AggregateCell {
  double classifications = 0.0;  ///< sum over families of their class count
  double unique_patents = 0.0;
};

struct ClassPanel {
  ClassLevel level = ClassLevel::subclass;
  YearRange years;
  std::map<std::string, std::map<long long, PanelCell>> classes;
  std::map<long long, AggregateCell> aggregate;
};

/// Id of the whole-panel aggregate pseudo-class accepted by group_growth.
inline constexpr const char* kAggregateId = "*";

ClassPanel build_panel(const EditionSnapshot& snapshot, ClassLevel level, YearRange years);

enum class GrowthMode { classifications, unique, fractional };

/// Yearly growth factor of one class (or of the aggregate "*") over the
/// range, via OLS on the log series. The class must be active (>= 1 member)
/// every year of the range; the first violating year is named otherwise.
GrowthFit group_growth(const ClassPanel& panel, const std::string& class_id, YearRange range,
                       GrowthMode mode);

/// Classifications per patent of a class: the total class count carried by
/// its patents over the panel years, divided by its unique patents.
double class_per_family(const ClassPanel& panel, const std::string& class_id);

/// Year-averaged variant: the mean over years (with at least one patent) of
/// that year's carried codes per patent.
double year_avg_class_per_family(const ClassPanel& panel, const std::string& class_id);

/// Standard OLS output: coefficients with conventional homoskedastic errors,
/// t statistics and two-sided p-values, plus the usual fit summary.
struct RegressionResult {
  struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 0.0;
  };
  std::vector<Coefficient> coefficients;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double residual_std_error = 0.0;
  long long residual_df = 0;
  double f_statistic = 0.0;
  long long f_df1 = 0;
  long long f_df2 = 0;
  double f_p_value = 0.0;
  long long n_obs = 0;
};

/// Least squares of y on X (plus an intercept column when requested) via a
/// column-pivoted QR. Requires rows > columns and full column rank; rank
/// deficiency is reported with the offending column's name.
RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, bool intercept,
                     std::span<const std::string> names = {});

/// Squared Pearson correlation. Requires equal lengths >= 2 and nonzero
/// variance on both sides.
double pearson_r2(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Measured quantities of one class feeding the regression layer.
struct GroupStats {
  std::string class_id;
  double g_k = 0.0;
  double w_k = 0.0;
  double w_k_year_avg = 0.0;
  double g_k_fractional = 0.0;
  double log_group_total = 0.0;
  double log_group_total_fractional = 0.0;
  std::array<long long, 3> recent_years{};
  std::array<double, 3> log_recent_patents{};
};

/// Builds GroupStats for every class active through growth_years whose
/// recent-year member counts are positive; other classes are skipped, per the
/// at-least-one-patent-each-year sub-selection.
std::vector<GroupStats> build_group_stats(const ClassPanel& panel, YearRange growth_years,
                                          std::array<long long, 3> recent_years);

struct OutlierFilter {
  std::vector<GroupStats> kept;
  std::vector<std::string> removed_groups;
  std::vector<std::string> touched_subclasses;
};

/// Drops groups with w_k above the threshold and reports which subclasses the
/// removed groups belong to.
OutlierFilter exclude_outlier_subclasses(std::vector<GroupStats> stats, double threshold = 9.0);

/// The three regression specifications run per CPC section:
///  - recent_year_controls: growth on w_k, log totals and three recent-year logs
///  - year_averaged:        growth on year-averaged w_k and log totals
///  - fractional:           fractional growth on w_k and fractional log totals
enum class RobustnessSpec { recent_year_controls, year_averaged, fractional };

struct SectionRegressions {
  std::map<char, RegressionResult> by_section;
  std::vector<std::pair<char, std::string>> rejected;  // section, reason
};

/// Groups stats by section (first character of the class id, section Y
/// excluded) and runs the chosen specification per section. Sections with too
/// few groups for the regressors are rejected with a reason.
SectionRegressions run_robustness_suite(std::span<const GroupStats> stats, RobustnessSpec spec);

}  // namespace reclass
