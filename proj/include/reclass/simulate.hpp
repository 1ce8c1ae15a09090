#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "reclass/model.hpp"

namespace reclass {

/// What the cells of a cohort matrix count.
enum class CountMode {
  patents,          ///< n_tau(t) counts patent families
  classifications,  ///< n_tau(t) counts classifications; unique patents are n_tau(tau)/w0
};

struct SimulationConfig {
  ModelParams params;
  long long horizon = 0;  ///< final year t_max, at most 10000
  /// Exogenous cohort seeds (tau, count); cohorts with tau > 0 are injected
  /// into n_tau(tau) when year tau is reached, on top of the triggered
  /// alpha * n(tau-1). Counts must be > 0.
  std::vector<std::pair<long long, double>> initial_cohorts = {{0, 1.0}};
  CountMode mode = CountMode::patents;
  double w0 = 1.0;  ///< classifications per new patent (classification mode only)
};

/// Triangular store of expected cohort counts n_tau(t) for 0 <= tau <= t,
/// built one year at a time by step(). Cells for tau > t are zero.
class CohortMatrix {
 public:
  CohortMatrix(CountMode mode, double w0);

  long long last_time() const { return last_time_; }
  CountMode mode() const { return mode_; }
  double w0() const { return w0_; }

  /// n_tau(t); zero for tau > t. Requires 0 <= t <= last_time(), tau >= 0.
  double cell(long long t, long long tau) const;
  /// Row total n(t).
  double total(long long t) const;
  /// Introduction count n_tau(tau).
  double introduced(long long tau) const;
  /// Unique patents filed in year tau (introduced / w0 in classification mode).
  double introduced_patents(long long tau) const;

  /// Adds an exogenous seed to the diagonal cell of the newest row; tau must
  /// equal last_time().
  void inject(long long tau, double amount);

 private:
  friend void step(CohortMatrix& state, const ModelParams& params);

  CountMode mode_;
  double w0_;
  long long last_time_ = 0;
  std::vector<double> cells_;   // row t occupies [t(t+1)/2, t(t+1)/2 + t]
  std::vector<double> totals_;  // per-row sums, maintained incrementally
};

/// Advances the state by one year: the new cohort gets alpha * n(t) and every
/// existing cohort tau <= t gains beta * n_tau(t) / (t - tau + 1).
void step(CohortMatrix& state, const ModelParams& params);

/// Runs the dynamics to config.horizon. Throws NumericalError if any cell
/// overflows to infinity.
CohortMatrix run(const SimulationConfig& config);

/// The row n_.(t) as a vector indexed by filing year tau = 0..t.
Eigen::VectorXd filing_year_profile(const CohortMatrix& matrix, long long t);

/// Earliest tau with profile[tau] >= profile[tau+1]; the final year if the
/// profile is strictly increasing. Requires a nonempty profile.
///
/// Under a single seed at tau = 0 that cohort always dominates tau = 1, so
/// peak hunting on canonical profiles should pass the interior segment
/// (0 < tau <= t) and shift the returned index by one.
long long peak_year(const Eigen::VectorXd& profile);

/// Total reclassification mass the step leaving year t applies:
/// sum_{tau<=t} beta * n_tau(t) / (t - tau + 1). This makes
/// n(t+1) - n(t) = alpha*n(t) + reclassified_total(t) an exact identity.
double reclassified_total(const CohortMatrix& matrix, const ModelParams& params, long long t);

/// One (filing year, reclassification window) observation. event_year is the
/// first of the window's event years; the window covers event_year ..
/// event_year + window_size - 1.
struct ReclassRecord {
  long long filing_year = 0;
  long long event_year = 0;
  double reclassified = 0.0;
  double classifications_before = 0.0;
};

struct ReclassEventStream {
  std::vector<ReclassRecord> records;
};

/// Builds the reclassification-rate samples a window of editions would show.
/// For each window starting at event year w and filing year tau < w, the
/// yearly relative gains of cohort tau over the window's event years are
/// summed and expressed against the pre-window count n_tau(w-1):
///
///   reclassified = n_tau(w-1) * sum_j [n_tau(w+j) - n_tau(w+j-1)] / n_tau(w+j-1)
///
/// so that reclassified / classifications_before equals the exact window sum
/// beta * sum_j 1/(w+j - tau), the data model fit_beta inverts.
/// Each window start w requires 1 <= w and w + window_size - 1 <= last_time().
ReclassEventStream emit_reclass_events(const CohortMatrix& matrix, const ModelParams& params,
                                       const std::vector<long long>& window_starts,
                                       int window_size = 3);

}  // namespace reclass
