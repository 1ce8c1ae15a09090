#include "reclass/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "reclass/special.hpp"

namespace reclass {

ClassPanel build_panel(const EditionSnapshot& snapshot, ClassLevel level, YearRange years) {
  ClassPanel panel;
  panel.level = level;
  panel.years = years;
  for (const auto& [family, record] : snapshot.records) {
    if (!years.contains(record.filing_year)) continue;
    std::set<std::string> ids;
    for (const auto& code : record.codes) ids.insert(truncate_code(code, level));
    if (ids.empty()) continue;
    const double m = static_cast<double>(ids.size());
    for (const auto& id : ids) {
      auto& cell = panel.classes[id][record.filing_year];
      cell.members += 1.0;
      cell.fractional += 1.0 / m;
      cell.carried_codes += m;
    }
    auto& agg = panel.aggregate[record.filing_year];
    agg.classifications += m;
    agg.unique_patents += 1.0;
  }
  return panel;
}

namespace {

const std::map<long long, PanelCell>& class_series(const ClassPanel& panel,
                                                   const std::string& class_id) {
  const auto it = panel.classes.find(class_id);
  if (it == panel.classes.end())
    throw std::invalid_argument("unknown class id '" + class_id + "'");
  return it->second;
}

}  // namespace

GrowthFit group_growth(const ClassPanel& panel, const std::string& class_id, YearRange range,
                       GrowthMode mode) {
  std::vector<std::pair<long long, double>> series;
  if (class_id == kAggregateId) {
    for (long long y = range.first; y <= range.last; ++y) {
      const auto it = panel.aggregate.find(y);
      const double count = it == panel.aggregate.end()
                               ? 0.0
                               : (mode == GrowthMode::classifications ? it->second.classifications
                                                                      : it->second.unique_patents);
      if (!(count > 0.0)) {
        std::ostringstream msg;
        msg << "aggregate inactive in year " << y;
        throw std::invalid_argument(msg.str());
      }
      series.emplace_back(y, count);
    }
  } else {
    const auto& cells = class_series(panel, class_id);
    for (long long y = range.first; y <= range.last; ++y) {
      const auto it = cells.find(y);
      if (it == cells.end() || !(it->second.members >= 1.0)) {
        std::ostringstream msg;
        msg << "class " << class_id << " inactive in year " << y;
        throw std::invalid_argument(msg.str());
      }
      const double count =
          mode == GrowthMode::fractional ? it->second.fractional : it->second.members;
      series.emplace_back(y, count);
    }
  }
  return fit_growth_ols(series, range);
}

double class_per_family(const ClassPanel& panel, const std::string& class_id) {
  const auto& cells = class_series(panel, class_id);
  double carried = 0.0;
  double patents = 0.0;
  for (const auto& [year, cell] : cells) {
    carried += cell.carried_codes;
    patents += cell.members;
  }
  if (!(patents > 0.0))
    throw std::invalid_argument("class " + class_id + " has no patents");
  return carried / patents;
}

double year_avg_class_per_family(const ClassPanel& panel, const std::string& class_id) {
  const auto& cells = class_series(panel, class_id);
  double sum = 0.0;
  long long years = 0;
  for (const auto& [year, cell] : cells) {
    if (!(cell.members > 0.0)) continue;
    sum += cell.carried_codes / cell.members;
    ++years;
  }
  if (years == 0)
    throw std::invalid_argument("class " + class_id + " has no patents");
  return sum / static_cast<double>(years);
}

RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, bool intercept,
                     std::span<const std::string> names) {
  const Eigen::Index n = y.size();
  if (X.rows() != n) throw std::invalid_argument("ols: y and X row counts differ");
  const Eigen::Index k = X.cols() + (intercept ? 1 : 0);
  if (n <= k) throw std::invalid_argument("ols: need more observations than regressors");

  std::vector<std::string> labels;
  if (intercept) labels.emplace_back("const");
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (static_cast<std::size_t>(j) < names.size()) {
      labels.push_back(names[j]);
    } else {
      labels.push_back("x" + std::to_string(j + 1));
    }
  }

  Eigen::MatrixXd Z(n, k);
  if (intercept) {
    Z.col(0).setOnes();
    Z.rightCols(X.cols()) = X;
  } else {
    Z = X;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  if (qr.rank() < k) {
    // The pivot past the numerical rank names a redundant column.
    const Eigen::Index bad = qr.colsPermutation().indices()(qr.rank());
    throw std::invalid_argument("ols: rank-deficient design, offending column '" +
                                labels[static_cast<std::size_t>(bad)] + "'");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - Z * beta;
  const double ssr = resid.squaredNorm();
  const long long df = n - k;
  const double sigma2 = ssr / static_cast<double>(df);
  const Eigen::MatrixXd cov = sigma2 * (Z.transpose() * Z).inverse();

  const double sst = intercept ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
  const double r2 = sst > 0.0 ? 1.0 - ssr / sst : 0.0;

  RegressionResult result;
  result.n_obs = n;
  result.residual_df = df;
  result.r_squared = r2;
  const double model_df = static_cast<double>(k - (intercept ? 1 : 0));
  result.adj_r_squared =
      1.0 - (1.0 - r2) * static_cast<double>(n - (intercept ? 1 : 0)) / static_cast<double>(df);
  result.residual_std_error = std::sqrt(sigma2);
  result.f_df1 = static_cast<long long>(model_df);
  result.f_df2 = df;
  if (model_df > 0.0 && r2 < 1.0) {
    result.f_statistic = (r2 / model_df) / ((1.0 - r2) / static_cast<double>(df));
    result.f_p_value = f_dist_upper_p(result.f_statistic, model_df, static_cast<double>(df));
  } else {
    result.f_statistic = std::numeric_limits<double>::quiet_NaN();
    result.f_p_value = std::numeric_limits<double>::quiet_NaN();
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    RegressionResult::Coefficient c;
    c.name = labels[static_cast<std::size_t>(j)];
    c.estimate = beta(j);
    c.std_error = std::sqrt(cov(j, j));
    c.t_stat = c.std_error > 0.0 ? c.estimate / c.std_error
                                 : std::numeric_limits<double>::quiet_NaN();
    c.p_value = student_t_two_sided_p(c.t_stat, static_cast<double>(df));
    result.coefficients.push_back(std::move(c));
  }
  return result;
}

double pearson_r2(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_r2: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson_r2: need at least 2 points");
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double sxx = xc.squaredNorm();
  const double syy = yc.squaredNorm();
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw std::invalid_argument("pearson_r2: zero-variance input");
  const double r = xc.dot(yc) / std::sqrt(sxx * syy);
  return r * r;
}

std::vector<GroupStats> build_group_stats(const ClassPanel& panel, YearRange growth_years,
                                          std::array<long long, 3> recent_years) {
  std::vector<GroupStats> stats;
  for (const auto& [class_id, cells] : panel.classes) {
    bool active = true;
    for (long long y = growth_years.first; y <= growth_years.last && active; ++y) {
      const auto it = cells.find(y);
      active = it != cells.end() && it->second.members >= 1.0;
    }
    if (!active) continue;

    GroupStats gs;
    gs.class_id = class_id;
    gs.recent_years = recent_years;
    bool recent_ok = true;
    for (std::size_t i = 0; i < recent_years.size(); ++i) {
      const auto it = cells.find(recent_years[i]);
      if (it == cells.end() || !(it->second.members > 0.0)) {
        recent_ok = false;
        break;
      }
      gs.log_recent_patents[i] = std::log(it->second.members);
    }
    if (!recent_ok) continue;

    gs.g_k = group_growth(panel, class_id, growth_years, GrowthMode::unique).g_hat;
    gs.g_k_fractional = group_growth(panel, class_id, growth_years, GrowthMode::fractional).g_hat;
    gs.w_k = class_per_family(panel, class_id);
    gs.w_k_year_avg = year_avg_class_per_family(panel, class_id);
    double total = 0.0;
    double total_fractional = 0.0;
    for (const auto& [year, cell] : cells) {
      total += cell.members;
      total_fractional += cell.fractional;
    }
    gs.log_group_total = std::log(total);
    gs.log_group_total_fractional = std::log(total_fractional);
    stats.push_back(std::move(gs));
  }
  return stats;
}

OutlierFilter exclude_outlier_subclasses(std::vector<GroupStats> stats, double threshold) {
  OutlierFilter out;
  std::set<std::string> subclasses;
  for (auto& gs : stats) {
    if (gs.w_k > threshold) {
      out.removed_groups.push_back(gs.class_id);
      subclasses.insert(gs.class_id.substr(0, std::min<std::size_t>(4, gs.class_id.size())));
    } else {
      out.kept.push_back(std::move(gs));
    }
  }
  out.touched_subclasses.assign(subclasses.begin(), subclasses.end());
  return out;
}

SectionRegressions run_robustness_suite(std::span<const GroupStats> stats, RobustnessSpec spec) {
  std::map<char, std::vector<const GroupStats*>> by_section;
  for (const auto& gs : stats) {
    if (gs.class_id.empty()) continue;
    const char section = gs.class_id[0];
    if (section == 'Y') continue;  // tagging scheme, not a technology section
    by_section[section].push_back(&gs);
  }

  SectionRegressions out;
  for (const auto& [section, groups] : by_section) {
    const std::size_t n = groups.size();
    std::size_t k = spec == RobustnessSpec::recent_year_controls ? 6 : 3;  // incl. intercept
    if (n <= k) {
      out.rejected.emplace_back(section, "only " + std::to_string(n) + " groups for " +
                                             std::to_string(k) + " coefficients");
      continue;
    }
    Eigen::VectorXd y(n);
    Eigen::MatrixXd X(n, k - 1);
    std::vector<std::string> names;
    switch (spec) {
      case RobustnessSpec::recent_year_controls:
        names = {"class_per_family", "log_group_total",
                 "log_patents_" + std::to_string(groups[0]->recent_years[0]),
                 "log_patents_" + std::to_string(groups[0]->recent_years[1]),
                 "log_patents_" + std::to_string(groups[0]->recent_years[2])};
        for (std::size_t i = 0; i < n; ++i) {
          y(i) = groups[i]->g_k - 1.0;
          X(i, 0) = groups[i]->w_k;
          X(i, 1) = groups[i]->log_group_total;
          X(i, 2) = groups[i]->log_recent_patents[0];
          X(i, 3) = groups[i]->log_recent_patents[1];
          X(i, 4) = groups[i]->log_recent_patents[2];
        }
        break;
      case RobustnessSpec::year_averaged:
        names = {"year_av_class_per_family", "log_group_total"};
        for (std::size_t i = 0; i < n; ++i) {
          y(i) = groups[i]->g_k - 1.0;
          X(i, 0) = groups[i]->w_k_year_avg;
          X(i, 1) = groups[i]->log_group_total;
        }
        break;
      case RobustnessSpec::fractional:
        names = {"class_per_family", "log_group_total_fractional"};
        for (std::size_t i = 0; i < n; ++i) {
          y(i) = groups[i]->g_k_fractional - 1.0;
          X(i, 0) = groups[i]->w_k;
          X(i, 1) = groups[i]->log_group_total_fractional;
        }
        break;
    }
    try {
      out.by_section[section] = ols(y, X, /*intercept=*/true, names);
    } catch (const std::invalid_argument& err) {
      out.rejected.emplace_back(section, err.what());
    }
  }
  return out;
}

}  // namespace reclass
