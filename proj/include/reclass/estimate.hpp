#pragma once

#include <map>
#include <span>
#include <utility>

#include "reclass/model.hpp"
#include "reclass/simulate.hpp"

namespace reclass {

/// Which lag enters the inverse-lag factor of the beta fit. The empirical
/// rate of a cohort at event year t is beta/(t - tau); writing the same
/// increment against the year it leaves instead gives beta/(t - tau + 1).
/// The default follows the empirical form; the dynamics form is kept so the
/// gap between the two can be measured.
enum class LagConvention { paper, dynamics };

struct BetaFit {
  double beta_hat = 0.0;
  double sum_squared_residual = 0.0;
  long long n_samples = 0;
};

/// Least-squares fit through the origin of the model r = beta * h, where each
/// record contributes r_i = reclassified / classifications_before and
/// h_i = sum_{j=0}^{window_size-1} 1/(event_year + j - filing_year)
/// (the dynamics convention adds 1 to each lag). Closed form
/// beta_hat = sum r_i h_i / sum h_i^2.
///
/// Rejects empty streams, records with event_year <= filing_year, and
/// records with a nonpositive denominator.
BetaFit fit_beta(const ReclassEventStream& stream, int window_size = 3,
                 LagConvention convention = LagConvention::paper);

/// Classification counts C_{Y,Y'} by (filing year Y, observation year Y'),
/// with the present year P >= every observation year. unique_families holds
/// optional per-filing-year family counts used for the W0 estimate.
struct ClassificationCountTable {
  std::map<std::pair<long long, long long>, double> counts;
  long long present_year = 0;
  std::map<long long, double> unique_families;

  /// C_{Y,Y'}; throws std::invalid_argument when absent.
  double at(long long filing_year, long long observation_year) const;
};

/// Unwinds reclassification gains from the present back to introduction:
/// returns C_{Y,P} * prod_{k=1}^{min(P-Y, depth)} (1 - beta/k). Only the
/// first `depth` lag factors are applied; later ones are close to 1 and are
/// skipped, which also leaves cohorts more than `depth` years old untouched
/// when the same truncation runs to an intermediate year. Requires beta < 1
/// so every factor stays positive.
double back_correct(const ClassificationCountTable& table, double beta, long long filing_year,
                    int depth = 10);

struct AlphaEstimate {
  double alpha_hat = 0.0;
  double w0_hat = 0.0;  ///< NaN when the table has no family count for the year
  long long year = 0;
  bool alpha_flagged = false;  ///< alpha_hat outside (0, 1)
  bool w0_flagged = false;     ///< w0_hat below 1
};

/// alpha_hat = corrected C_{Y,Y} divided by the corrected classifications of
/// all earlier filing years at year Y:
///
///   alpha_hat = back_correct(Y) / sum_{Y'<Y} C_{Y',P} * prod_{k=Y-Y'+1}^{min(P-Y', depth)} (1 - beta/k)
///
/// w0_hat divides the corrected C_{Y,Y} by the unique families filed in Y
/// when the table carries them. A zero denominator is an estimation failure
/// (NumericalError).
AlphaEstimate estimate_alpha(const ClassificationCountTable& table, double beta,
                             long long filing_year, int depth = 10);

struct GrowthFit {
  double g_hat = 0.0;
  double r2 = 0.0;
};

/// Inclusive year range.
struct YearRange {
  long long first = 0;
  long long last = 0;
  bool contains(long long y) const { return y >= first && y <= last; }
};

/// OLS of ln(count) on year over the given range; g_hat = exp(slope).
/// Requires at least 3 in-range points, all counts > 0.
GrowthFit fit_growth_ols(std::span<const std::pair<long long, double>> series, YearRange range);

/// Asymptotic prefactor n0 of n(t) ~ n0 g^t, estimated as
/// exact_total(t_star) / g^t_star.
double estimate_prefactor(const ModelParams& params, long long t_star = 200);

}  // namespace reclass
