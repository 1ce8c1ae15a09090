#include "reclass/acceptance.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "reclass/analysis.hpp"
#include "reclass/estimate.hpp"
#include "reclass/fixtures.hpp"
#include "reclass/model.hpp"
#include "reclass/simulate.hpp"
#include "reclass/snapshot.hpp"
#include "reclass/special.hpp"

namespace reclass {

namespace {

const std::vector<double> kGridAlpha = {0.01, 0.025, 0.05, 0.1};
const std::vector<double> kGridBeta = {0.0, 0.1, 0.4, 0.5, 1.0};

CriterionResult criterion(int id, std::string name) {
  CriterionResult c;
  c.id = id;
  c.name = std::move(name);
  return c;
}

double rel_err(double value, double reference) {
  const double scale = std::max(std::abs(reference), 1e-300);
  return std::abs(value - reference) / scale;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

CriterionResult growth_factor_interval() {
  CriterionResult c = criterion(1, "growth-factor in (1.07, 1.08) for alpha 0.024..0.027, beta 0.4");
  const double g_lo = growth_factor({0.024, 0.4}).g;
  const double g_hi = growth_factor({0.027, 0.4}).g;
  c.passed = g_lo > 1.07 && g_lo < 1.08 && g_hi > 1.07 && g_hi < 1.08;
  c.detail = "g(0.024)=" + fmt(g_lo) + " g(0.027)=" + fmt(g_hi);
  return c;
}

CriterionResult decline_time_values() {
  CriterionResult c = criterion(2, "decline times 5.06 and 7.59 at g=1.079");
  const double t1 = decline_time(0.4, 1.079);
  const double t2 = decline_time(0.6, 1.079);
  c.passed = std::abs(t1 - 5.06) <= 0.05 && std::abs(t2 - 7.59) <= 0.05;
  c.detail = "T(beta=0.4)=" + fmt(t1) + " T(beta=0.6)=" + fmt(t2);
  return c;
}

CriterionResult reclass_proportion_value() {
  CriterionResult c = criterion(3, "reclassification proportion 0.056 at g=1.08, alpha=0.024");
  const double v = reclass_proportion(1.08, 0.024);
  c.passed = std::abs(v - 0.056) <= 0.001;
  c.detail = "V=" + fmt(v);
  return c;
}

CriterionResult class_per_patent_interval() {
  CriterionResult c = criterion(4, "classifications per patent spans [3.66, 4.11]");
  const double w_low = class_per_patent(1.25, 1.079, 0.027);
  const double w_high = class_per_patent(1.25, 1.079, 0.024);
  c.passed = std::abs(w_low - 3.66) <= 0.05 && std::abs(w_high - 4.11) <= 0.05;
  c.detail = "W(0.027)=" + fmt(w_low) + " W(0.024)=" + fmt(w_high);
  return c;
}

CriterionResult oracle_equivalence() {
  CriterionResult c = criterion(5, "exact solutions match the forward recurrence to 1e-9");
  double worst = 0.0;
  for (const double alpha : kGridAlpha) {
    for (const double beta : kGridBeta) {
      const ModelParams params{alpha, beta};
      SimulationConfig config;
      config.params = params;
      config.horizon = 60;
      const CohortMatrix matrix = run(config);
      for (long long t = 0; t <= 60; ++t) {
        for (long long tau = 0; tau <= t; ++tau) {
          worst = std::max(worst, rel_err(exact_cohort_count(params, tau, t), matrix.cell(t, tau)));
        }
        worst = std::max(worst, rel_err(exact_total(params, t), matrix.total(t)));
      }
    }
  }
  c.passed = worst <= 1e-9;
  c.detail = "max relative error " + fmt(worst);
  return c;
}

CriterionResult generating_function_series() {
  CriterionResult c = criterion(6, "closed-form G(z) matches the 400-term series to 1e-6");
  double worst = 0.0;
  for (const double alpha : kGridAlpha) {
    for (const double beta : kGridBeta) {
      const ModelParams params{alpha, beta};
      const double g = growth_factor(params).g;
      const double z = 0.9 / g;
      double series = 0.0;
      double zt = 1.0;
      for (long long t = 0; t <= 400; ++t) {
        series += exact_total(params, t) * zt;
        zt *= z;
      }
      worst = std::max(worst, rel_err(generating_function_closed(params, z), series));
    }
  }
  c.passed = worst <= 1e-6;
  c.detail = "max relative error " + fmt(worst);
  return c;
}

CriterionResult bounds_and_monotonicity() {
  CriterionResult c = criterion(7, "g bounds and monotonicity on 500 random (alpha, beta)");
  std::mt19937 rng(20240811);
  const auto draw = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng()) + 1.0) / 4294967297.0;
  };
  int failures = 0;
  std::string first;
  for (int i = 0; i < 500; ++i) {
    const double alpha = draw(0.0, 0.2);
    const double beta = draw(0.0, 1.0);
    const double g = growth_factor({alpha, beta}).g;
    const bool bounds = g >= 1.0 + alpha && g < 1.0 + alpha + beta;
    const bool mono_alpha = growth_factor({alpha * 1.05 + 1e-6, beta}).g > g;
    const bool mono_beta = growth_factor({alpha, beta + 0.05}).g > g;
    if (!(bounds && mono_alpha && mono_beta)) {
      ++failures;
      if (first.empty())
        first = "alpha=" + fmt(alpha) + " beta=" + fmt(beta) + " g=" + fmt(g);
    }
  }
  c.passed = failures == 0;
  c.detail = failures == 0 ? "500 draws ok" : std::to_string(failures) + " failures, first " + first;
  return c;
}

CriterionResult slow_growth_accuracy() {
  CriterionResult c = criterion(8, "slow-growth closed form within 10% of g-1 for alpha <= 1e-4");
  double worst = 0.0;
  for (const double alpha : {1e-6, 1e-5, 1e-4}) {
    for (const double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double g = growth_factor({alpha, beta}, 1e-14).g;
      const double approx = slow_growth_approx({alpha, beta}) - 1.0;
      worst = std::max(worst, std::abs((g - 1.0) - approx) / approx);
    }
  }
  c.passed = worst <= 0.10;
  c.detail = "max |g-1 - approx| / approx = " + fmt(worst);
  return c;
}

CriterionResult peak_location() {
  CriterionResult c = criterion(9, "profile peak lag within 1 year of beta/(g-1)");
  double worst = 0.0;
  for (const double alpha : {0.02, 0.04, 0.06}) {
    for (const double beta : {0.3, 0.45, 0.6}) {
      const ModelParams params{alpha, beta};
      SimulationConfig config;
      config.params = params;
      config.horizon = 100;
      const CohortMatrix matrix = run(config);
      const double expected = decline_time(beta, growth_factor(params).g);
      for (const long long t : {60LL, 100LL}) {
        const Eigen::VectorXd profile = filing_year_profile(matrix, t);
        const long long tau_star = 1 + peak_year(profile.segment(1, t));
        worst = std::max(worst, std::abs(static_cast<double>(t - tau_star) - expected));
      }
    }
  }
  c.passed = worst <= 1.0;
  c.detail = "max |(t - tau*) - beta/(g-1)| = " + fmt(worst);
  return c;
}

CriterionResult v_convergence() {
  CriterionResult c = criterion(10, "simulated v(t)/n(t) at t=300 within 5% of g-1-alpha");
  double worst = 0.0;
  for (const double alpha : {0.02, 0.04, 0.06}) {
    for (const double beta : {0.3, 0.45, 0.6}) {
      const ModelParams params{alpha, beta};
      SimulationConfig config;
      config.params = params;
      config.horizon = 300;
      const CohortMatrix matrix = run(config);
      const double ratio = reclassified_total(matrix, params, 300) / matrix.total(300);
      const double v = reclass_proportion(growth_factor(params).g, alpha);
      worst = std::max(worst, rel_err(ratio, v));
    }
  }
  c.passed = worst <= 0.05;
  c.detail = "max relative deviation " + fmt(worst);
  return c;
}

CriterionResult estimation_round_trips() {
  CriterionResult c = criterion(11, "beta within 5%, alpha within 10%, noiseless fits exact");
  std::ostringstream detail;

  SimulationConfig config;
  config.params = {0.025, 0.4};
  config.horizon = 60;
  const CohortMatrix matrix = run(config);
  const ReclassEventStream stream = emit_reclass_events(matrix, config.params, {50});
  const double beta_hat = fit_beta(stream).beta_hat;
  const bool beta_ok = rel_err(beta_hat, 0.4) <= 0.05;
  detail << "beta_hat=" << fmt(beta_hat);

  CountTablePlan plan;
  plan.alpha = 0.025;
  plan.beta = 0.4;
  const ClassificationCountTable table = make_count_table(plan);
  const AlphaEstimate est = estimate_alpha(table, plan.beta, 30, plan.depth);
  const bool alpha_ok = rel_err(est.alpha_hat, plan.alpha) <= 0.10;
  detail << " alpha_hat=" << fmt(est.alpha_hat);

  ReclassEventStream noiseless;
  for (long long tau = 0; tau < 40; ++tau) {
    const double h = 1.0 / (41.0 - tau) + 1.0 / (42.0 - tau) + 1.0 / (43.0 - tau);
    noiseless.records.push_back({tau, 41, 100.0 * 0.37 * h, 100.0});
  }
  const double beta_exact = fit_beta(noiseless).beta_hat;
  const bool noiseless_beta_ok = std::abs(beta_exact - 0.37) <= 1e-10;

  std::vector<std::pair<long long, double>> series;
  for (long long year = 1980; year <= 2015; ++year)
    series.emplace_back(year, 7.0 * std::pow(1.08, static_cast<double>(year - 1980)));
  const GrowthFit fit = fit_growth_ols(series, {1980, 2015});
  const bool growth_ok = std::abs(fit.g_hat - 1.08) <= 1e-10 && std::abs(fit.r2 - 1.0) <= 1e-12;
  detail << " g_hat=" << fmt(fit.g_hat);

  c.passed = beta_ok && alpha_ok && noiseless_beta_ok && growth_ok;
  c.detail = detail.str();
  return c;
}

CriterionResult binomial_identity() {
  CriterionResult c = criterion(12, "binomial convolution identity on 100 random cases");
  std::mt19937 rng(987654);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double beta = 3.0 * (static_cast<double>(rng()) + 1.0) / 4294967297.0;
    const long long tau = 1 + static_cast<long long>(rng() % 12);
    const long long u = static_cast<long long>(rng() % static_cast<unsigned long>(tau));
    const auto [lhs, rhs] = identity_check(beta, tau, u);
    worst = std::max(worst, rel_err(lhs, rhs));
  }
  c.passed = worst <= 1e-9;
  c.detail = "max relative error " + fmt(worst);
  return c;
}

CriterionResult snapshot_pipeline() {
  CriterionResult c = criterion(13, "diff matches the generator plan; log-log slope 1.0, offset 0.05");

  SnapshotPairPlan plan;
  plan.seed = 42;
  plan.class_sizes = {{"A01B", 20},  {"B02C", 40},  {"C03D", 80},
                      {"D04E", 160}, {"F05G", 320}, {"G06H", 640}};
  plan.add_rate = 0.05;
  plan.remove_rate = 0.0;
  const SnapshotPairFixture fx = make_snapshot_pair(plan);
  const DiffResult result = diff(fx.earlier, fx.later, ClassLevel::subclass);
  bool tallies_ok = result.cells.size() == fx.expected.size();
  for (const auto& [key, cell] : fx.expected) {
    const auto it = result.cells.find(key);
    if (it == result.cells.end() || it->second.positive != cell.positive ||
        it->second.negative != cell.negative || it->second.baseline != cell.baseline) {
      tallies_ok = false;
      break;
    }
  }

  const auto rows = reclass_vs_size(result, fx.earlier, ClassLevel::subclass);
  Eigen::VectorXd lx(static_cast<Eigen::Index>(rows.size()));
  Eigen::VectorXd ly(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lx(static_cast<Eigen::Index>(i)) = std::log10(static_cast<double>(rows[i].size));
    ly(static_cast<Eigen::Index>(i)) = std::log10(rows[i].positive);
  }
  const RegressionResult fit = ols(ly, lx, /*intercept=*/true, {});
  const double slope = fit.coefficients[1].estimate;
  const double offset = std::pow(10.0, fit.coefficients[0].estimate);
  const bool slope_ok = std::abs(slope - 1.0) <= 0.01;
  const bool offset_ok = std::abs(offset - plan.add_rate) <= 0.005;

  c.passed = tallies_ok && slope_ok && offset_ok;
  c.detail = std::string("tallies ") + (tallies_ok ? "exact" : "MISMATCH") +
             ", slope=" + fmt(slope) + ", constant=" + fmt(offset);
  return c;
}

CriterionResult regression_layer() {
  CriterionResult c = criterion(14, "OLS vs normal equations; planted effect; cross-class slope");
  std::ostringstream detail;

  // (a) QR solution against an explicit normal-equations solve
  std::mt19937 rng(13579);
  const auto draw = [&] { return (static_cast<double>(rng()) / 4294967296.0) * 2.0 - 1.0; };
  Eigen::MatrixXd X(200, 3);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = draw();
    y(i) = 1.5 + 0.7 * X(i, 0) - 2.0 * X(i, 1) + 0.1 * X(i, 2) + 0.3 * draw();
  }
  const RegressionResult fit = ols(y, X, /*intercept=*/true, {});
  Eigen::MatrixXd Z(200, 4);
  Z.col(0).setOnes();
  Z.rightCols(3) = X;
  const Eigen::VectorXd brute = (Z.transpose() * Z).ldlt().solve(Z.transpose() * y);
  double coef_err = 0.0;
  for (int j = 0; j < 4; ++j)
    coef_err = std::max(coef_err, std::abs(fit.coefficients[j].estimate - brute(j)));
  const bool ols_ok = coef_err <= 1e-8;
  detail << "coef dev " << fmt(coef_err);

  // (b) planted w_k effect recovered within 2 standard errors per section
  PlantedGroupPlan plant;
  const std::vector<GroupStats> stats = make_planted_group_stats(plant);
  const SectionRegressions sections =
      run_robustness_suite(stats, RobustnessSpec::recent_year_controls);
  bool planted_ok = sections.rejected.empty() && !sections.by_section.empty();
  for (const auto& [section, reg] : sections.by_section) {
    const auto& coef = reg.coefficients[1];  // class_per_family
    if (std::abs(coef.estimate - plant.w_slope) > 2.0 * coef.std_error) planted_ok = false;
  }
  detail << "; planted " << (planted_ok ? "ok" : "MISS");

  // (c) heterogeneous-beta classes: slope of (g_k - 1) on w_k vs alpha/W0
  const double alpha = 0.025;
  const double w0 = 1.25;
  std::vector<double> gs, ws;
  for (const double beta : {0.3, 0.45, 0.6}) {
    SimulationConfig config;
    config.params = {alpha, beta};
    config.horizon = 200;
    config.mode = CountMode::classifications;
    config.w0 = w0;
    const CohortMatrix matrix = run(config);
    std::vector<std::pair<long long, double>> series;
    for (long long t = 150; t <= 190; ++t) series.emplace_back(t, matrix.total(t));
    gs.push_back(fit_growth_ols(series, {150, 190}).g_hat);
    double patents = 0.0;
    for (long long tau = 0; tau <= 200; ++tau) patents += matrix.introduced_patents(tau);
    ws.push_back(matrix.total(200) / patents);
  }
  Eigen::MatrixXd W(static_cast<Eigen::Index>(ws.size()), 1);
  Eigen::VectorXd G(static_cast<Eigen::Index>(gs.size()));
  for (std::size_t i = 0; i < ws.size(); ++i) {
    W(static_cast<Eigen::Index>(i), 0) = ws[i];
    G(static_cast<Eigen::Index>(i)) = gs[i] - 1.0;
  }
  const double slope = ols(G, W, /*intercept=*/true, {}).coefficients[1].estimate;
  const bool slope_ok = rel_err(slope, alpha / w0) <= 0.15;
  detail << "; cross-class slope " << fmt(slope) << " vs " << fmt(alpha / w0);

  c.passed = ols_ok && planted_ok && slope_ok;
  c.detail = detail.str();
  return c;
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> results;
  results.push_back(growth_factor_interval());
  results.push_back(decline_time_values());
  results.push_back(reclass_proportion_value());
  results.push_back(class_per_patent_interval());
  results.push_back(oracle_equivalence());
  results.push_back(generating_function_series());
  results.push_back(bounds_and_monotonicity());
  results.push_back(slow_growth_accuracy());
  results.push_back(peak_location());
  results.push_back(v_convergence());
  results.push_back(estimation_round_trips());
  results.push_back(binomial_identity());
  results.push_back(snapshot_pipeline());
  results.push_back(regression_layer());
  return results;
}

std::string format_criterion(const CriterionResult& result) {
  std::ostringstream line;
  line << (result.passed ? "PASS" : "FAIL") << "  " << result.id << "  " << result.name << "  ["
       << result.detail << "]";
  return line.str();
}

}  // namespace reclass
