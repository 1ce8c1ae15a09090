#include "reclass/simulate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "reclass/errors.hpp"

namespace reclass {

namespace {

constexpr long long kMaxHorizon = 10000;

long long row_offset(long long t) { return t * (t + 1) / 2; }

}  // namespace

CohortMatrix::CohortMatrix(CountMode mode, double w0) : mode_(mode), w0_(w0) {
  if (mode_ == CountMode::classifications && !(w0_ > 0.0))
    throw std::invalid_argument("CohortMatrix: w0 must be > 0 in classification mode");
  if (mode_ == CountMode::patents) w0_ = 1.0;
  cells_.push_back(0.0);
  totals_.push_back(0.0);
}

double CohortMatrix::cell(long long t, long long tau) const {
  if (t < 0 || t > last_time_) throw std::invalid_argument("CohortMatrix::cell: t out of range");
  if (tau < 0) throw std::invalid_argument("CohortMatrix::cell: tau must be >= 0");
  if (tau > t) return 0.0;
  return cells_[row_offset(t) + tau];
}

double CohortMatrix::total(long long t) const {
  if (t < 0 || t > last_time_) throw std::invalid_argument("CohortMatrix::total: t out of range");
  return totals_[t];
}

double CohortMatrix::introduced(long long tau) const { return cell(tau, tau); }

double CohortMatrix::introduced_patents(long long tau) const { return introduced(tau) / w0_; }

void CohortMatrix::inject(long long tau, double amount) {
  if (tau != last_time_) throw std::invalid_argument("CohortMatrix::inject: tau must equal last_time()");
  if (!(amount > 0.0)) throw std::invalid_argument("CohortMatrix::inject: amount must be > 0");
  cells_[row_offset(tau) + tau] += amount;
  totals_[tau] += amount;
}

void step(CohortMatrix& state, const ModelParams& params) {
  if (!(params.alpha >= 0.0 && params.beta >= 0.0))
    throw std::invalid_argument("step: alpha and beta must be >= 0");
  const long long t = state.last_time_;
  const long long base = row_offset(t);
  double next_total = 0.0;
  state.cells_.resize(static_cast<std::size_t>(row_offset(t + 1) + t + 2));
  const long long next_base = row_offset(t + 1);
  for (long long tau = 0; tau <= t; ++tau) {
    const double n = state.cells_[base + tau];
    const double grown = n + params.beta * n / static_cast<double>(t - tau + 1);
    state.cells_[next_base + tau] = grown;
    next_total += grown;
  }
  const double born = params.alpha * state.totals_[t];
  state.cells_[next_base + t + 1] = born;
  next_total += born;
  state.totals_.push_back(next_total);
  state.last_time_ = t + 1;
}

CohortMatrix run(const SimulationConfig& config) {
  if (config.horizon < 0 || config.horizon > kMaxHorizon)
    throw std::invalid_argument("run: horizon must be in [0, 10000]");
  if (config.initial_cohorts.empty())
    throw std::invalid_argument("run: at least one initial cohort is required");
  for (const auto& [tau, count] : config.initial_cohorts) {
    if (tau < 0 || tau > config.horizon)
      throw std::invalid_argument("run: initial cohort year outside [0, horizon]");
    if (!(count > 0.0)) throw std::invalid_argument("run: initial counts must be > 0");
  }

  CohortMatrix matrix(config.mode, config.w0);
  const auto inject_at = [&](long long tau) {
    for (const auto& [itau, count] : config.initial_cohorts) {
      if (itau == tau) matrix.inject(tau, count);
    }
  };
  inject_at(0);
  for (long long t = 1; t <= config.horizon; ++t) {
    step(matrix, config.params);
    inject_at(t);
    if (!std::isfinite(matrix.total(t))) {
      std::ostringstream msg;
      msg << "run: cohort counts overflowed at t = " << t;
      throw NumericalError(msg.str());
    }
  }
  return matrix;
}

Eigen::VectorXd filing_year_profile(const CohortMatrix& matrix, long long t) {
  if (t < 0 || t > matrix.last_time())
    throw std::invalid_argument("filing_year_profile: t out of range");
  Eigen::VectorXd profile(t + 1);
  for (long long tau = 0; tau <= t; ++tau) profile[tau] = matrix.cell(t, tau);
  return profile;
}

long long peak_year(const Eigen::VectorXd& profile) {
  if (profile.size() == 0) throw std::invalid_argument("peak_year: empty profile");
  for (long long tau = 0; tau + 1 < profile.size(); ++tau) {
    if (profile[tau] >= profile[tau + 1]) return tau;
  }
  return profile.size() - 1;
}

double reclassified_total(const CohortMatrix& matrix, const ModelParams& params, long long t) {
  if (t < 0 || t > matrix.last_time())
    throw std::invalid_argument("reclassified_total: t out of range");
  double sum = 0.0;
  for (long long tau = 0; tau <= t; ++tau) {
    sum += params.beta * matrix.cell(t, tau) / static_cast<double>(t - tau + 1);
  }
  return sum;
}

ReclassEventStream emit_reclass_events(const CohortMatrix& matrix, const ModelParams& params,
                                       const std::vector<long long>& window_starts,
                                       int window_size) {
  if (window_size < 1) throw std::invalid_argument("emit_reclass_events: window_size must be >= 1");
  if (!(params.beta >= 0.0)) throw std::invalid_argument("emit_reclass_events: beta must be >= 0");
  // Rates are measured off the matrix; for run()-produced matrices each
  // yearly relative gain equals params.beta / (event year - tau) exactly.
  ReclassEventStream stream;
  for (const long long w : window_starts) {
    if (w < 1 || w + window_size - 1 > matrix.last_time())
      throw std::invalid_argument("emit_reclass_events: window outside the simulated horizon");
    for (long long tau = 0; tau < w; ++tau) {
      const double before = matrix.cell(w - 1, tau);
      if (!(before > 0.0)) continue;
      double rate = 0.0;
      for (int j = 0; j < window_size; ++j) {
        const double prev = matrix.cell(w + j - 1, tau);
        const double cur = matrix.cell(w + j, tau);
        rate += (cur - prev) / prev;
      }
      stream.records.push_back({tau, w, before * rate, before});
    }
  }
  return stream;
}

}  // namespace reclass
