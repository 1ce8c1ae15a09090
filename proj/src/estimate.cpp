#include "reclass/estimate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "reclass/errors.hpp"

namespace reclass {

BetaFit fit_beta(const ReclassEventStream& stream, int window_size, LagConvention convention) {
  if (stream.records.empty()) throw std::invalid_argument("fit_beta: empty stream");
  if (window_size < 1) throw std::invalid_argument("fit_beta: window_size must be >= 1");

  std::vector<double> rates;
  std::vector<double> factors;
  rates.reserve(stream.records.size());
  factors.reserve(stream.records.size());
  for (const auto& rec : stream.records) {
    if (rec.event_year <= rec.filing_year)
      throw std::invalid_argument("fit_beta: event_year must be after filing_year");
    if (!(rec.classifications_before > 0.0))
      throw std::invalid_argument("fit_beta: classifications_before must be > 0");
    double h = 0.0;
    for (int j = 0; j < window_size; ++j) {
      long long lag = rec.event_year + j - rec.filing_year;
      if (convention == LagConvention::dynamics) lag += 1;
      if (lag <= 0) throw std::invalid_argument("fit_beta: event year coincides with filing year");
      h += 1.0 / static_cast<double>(lag);
    }
    rates.push_back(rec.reclassified / rec.classifications_before);
    factors.push_back(h);
  }

  double rh = 0.0;
  double hh = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    rh += rates[i] * factors[i];
    hh += factors[i] * factors[i];
  }
  BetaFit fit;
  fit.n_samples = static_cast<long long>(rates.size());
  fit.beta_hat = rh / hh;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double resid = rates[i] - fit.beta_hat * factors[i];
    fit.sum_squared_residual += resid * resid;
  }
  return fit;
}

double ClassificationCountTable::at(long long filing_year, long long observation_year) const {
  const auto it = counts.find({filing_year, observation_year});
  if (it == counts.end()) {
    std::ostringstream msg;
    msg << "count table: no entry for filing year " << filing_year << " observed at "
        << observation_year;
    throw std::invalid_argument(msg.str());
  }
  return it->second;
}

namespace {

// prod_{k=first_lag}^{min(last_lag, depth)} (1 - beta/k); empty ranges give 1.
double unwind_product(double beta, long long first_lag, long long last_lag, int depth) {
  double prod = 1.0;
  const long long stop = std::min<long long>(last_lag, depth);
  for (long long k = first_lag; k <= stop; ++k) {
    prod *= 1.0 - beta / static_cast<double>(k);
  }
  return prod;
}

}  // namespace

double back_correct(const ClassificationCountTable& table, double beta, long long filing_year,
                    int depth) {
  if (!(beta < 1.0)) throw std::invalid_argument("back_correct: beta must be < 1");
  if (depth < 0) throw std::invalid_argument("back_correct: depth must be >= 0");
  if (filing_year > table.present_year)
    throw std::invalid_argument("back_correct: filing year after the present year");
  const double present = table.at(filing_year, table.present_year);
  return present * unwind_product(beta, 1, table.present_year - filing_year, depth);
}

AlphaEstimate estimate_alpha(const ClassificationCountTable& table, double beta,
                             long long filing_year, int depth) {
  const double corrected = back_correct(table, beta, filing_year, depth);

  double denominator = 0.0;
  for (const auto& [key, count] : table.counts) {
    const auto& [year, observed] = key;
    if (observed != table.present_year || year >= filing_year) continue;
    denominator +=
        count * unwind_product(beta, filing_year - year + 1, table.present_year - year, depth);
  }
  if (denominator == 0.0)
    throw NumericalError("estimate_alpha: zero classification stock before the filing year");

  AlphaEstimate est;
  est.year = filing_year;
  est.alpha_hat = corrected / denominator;
  est.alpha_flagged = !(est.alpha_hat > 0.0 && est.alpha_hat < 1.0);
  est.w0_hat = std::numeric_limits<double>::quiet_NaN();
  const auto fam = table.unique_families.find(filing_year);
  if (fam != table.unique_families.end()) {
    if (!(fam->second > 0.0))
      throw NumericalError("estimate_alpha: zero unique families for the filing year");
    est.w0_hat = corrected / fam->second;
    est.w0_flagged = est.w0_hat < 1.0;
  }
  return est;
}

GrowthFit fit_growth_ols(std::span<const std::pair<long long, double>> series, YearRange range) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [year, count] : series) {
    if (!range.contains(year)) continue;
    if (!(count > 0.0)) {
      std::ostringstream msg;
      msg << "fit_growth_ols: nonpositive count at year " << year;
      throw std::invalid_argument(msg.str());
    }
    xs.push_back(static_cast<double>(year));
    ys.push_back(std::log(count));
  }
  if (xs.size() < 3) throw std::invalid_argument("fit_growth_ols: need at least 3 points in range");

  const Eigen::Map<Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double sxx = xc.squaredNorm();
  const double slope = xc.dot(yc) / sxx;
  const double sst = yc.squaredNorm();
  const double ssr = (yc - slope * xc).squaredNorm();

  GrowthFit fit;
  fit.g_hat = std::exp(slope);
  fit.r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;  // constant series: flat line fits perfectly
  return fit;
}

double estimate_prefactor(const ModelParams& params, long long t_star) {
  if (t_star < 0) throw std::invalid_argument("estimate_prefactor: t_star must be >= 0");
  const GrowthSolution sol = growth_factor(params);
  return exact_total(params, t_star) / std::pow(sol.g, static_cast<double>(t_star));
}

}  // namespace reclass
