#include "reclass/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "reclass/errors.hpp"
#include "reclass/special.hpp"

namespace reclass {

namespace {

void require_rates(const ModelParams& p) {
  if (!(p.alpha >= 0.0)) throw std::invalid_argument("ModelParams: alpha must be >= 0");
  if (!(p.beta >= 0.0)) throw std::invalid_argument("ModelParams: beta must be >= 0");
}

void require_asymptotic(const ModelParams& p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0))
    throw std::invalid_argument("ModelParams: alpha must be in (0, 1) for asymptotic quantities");
  if (!(p.beta >= 0.0)) throw std::invalid_argument("ModelParams: beta must be >= 0");
}

}  // namespace

double cohort_from_intro(const ModelParams& params, double n_intro, long long tau, long long t) {
  require_rates(params);
  if (t < tau) throw std::invalid_argument("cohort_from_intro: t must be >= tau");
  if (!(n_intro >= 0.0)) throw std::invalid_argument("cohort_from_intro: n_intro must be >= 0");
  const long long lag = t - tau;
  return gen_binomial(static_cast<double>(lag) + params.beta, lag) * n_intro;
}

namespace {

// sum_{u=0}^{tau} binom(u*beta + tau - 1, tau - u) alpha^u, the introduction
// count n_tau(tau) of the canonical solution. All nonzero terms are positive.
double intro_series(const ModelParams& params, long long tau) {
  double sum = 0.0;
  double alpha_pow = 1.0;
  for (long long u = 0; u <= tau; ++u) {
    sum += gen_binomial(u * params.beta + static_cast<double>(tau) - 1.0, tau - u) * alpha_pow;
    alpha_pow *= params.alpha;
  }
  return sum;
}

}  // namespace

double exact_cohort_count(const ModelParams& params, long long tau, long long t) {
  require_rates(params);
  if (tau < 0 || t < tau) throw std::invalid_argument("exact_cohort_count: need t >= tau >= 0");
  const long long lag = t - tau;
  return gen_binomial(static_cast<double>(lag) + params.beta, lag) * intro_series(params, tau);
}

double exact_total(const ModelParams& params, long long t) {
  require_rates(params);
  if (t < 0) throw std::invalid_argument("exact_total: t must be >= 0");
  double sum = 0.0;
  double alpha_pow = 1.0;
  for (long long u = 0; u <= t; ++u) {
    sum += gen_binomial((static_cast<double>(u) + 1.0) * params.beta + static_cast<double>(t), t - u) *
           alpha_pow;
    alpha_pow *= params.alpha;
  }
  return sum;
}

GrowthSolution growth_factor(const ModelParams& params, double tol) {
  require_asymptotic(params);
  if (!(tol > 0.0)) throw std::invalid_argument("growth_factor: tol must be > 0");

  GrowthSolution sol;
  sol.n0 = std::numeric_limits<double>::quiet_NaN();
  if (params.beta == 0.0) {
    // The bracket degenerates; (1 - 1/g) = alpha/g gives g = 1 + alpha exactly.
    sol.g = 1.0 + params.alpha;
    sol.residual = 0.0;
    return sol;
  }

  const auto f = [&](double g) {
    return std::pow(1.0 - 1.0 / g, 1.0 + params.beta) - params.alpha / g;
  };

  double lo = 1.0 + params.alpha;
  double hi = 1.0 + params.alpha + params.beta;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo <= 0.0 && f_hi > 0.0)) {
    std::ostringstream msg;
    msg << "growth_factor: no sign change on [" << lo << ", " << hi << "]";
    throw NumericalError(msg.str());
  }

  for (int iter = 0; iter < 200 && (hi - lo) > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  sol.g = 0.5 * (lo + hi);
  sol.residual = f(sol.g);
  return sol;
}

double slow_growth_approx(const ModelParams& params) {
  if (!(params.alpha > 0.0)) throw std::invalid_argument("slow_growth_approx: alpha must be > 0");
  if (!(params.beta >= 0.0)) throw std::invalid_argument("slow_growth_approx: beta must be >= 0");
  return 1.0 + std::pow(params.alpha, 1.0 / (1.0 + params.beta));
}

double decline_time(double beta, double g) {
  if (!(g > 1.0)) throw std::invalid_argument("decline_time: g must be > 1");
  if (!(beta >= 0.0)) throw std::invalid_argument("decline_time: beta must be >= 0");
  return beta / (g - 1.0);
}

double reclass_proportion(double g, double alpha) {
  if (!(g >= 1.0 + alpha))
    throw std::invalid_argument("reclass_proportion: g must be >= 1 + alpha");
  return g - 1.0 - alpha;
}

double class_per_patent(double w0, double g, double alpha) {
  if (!(w0 > 0.0)) throw std::invalid_argument("class_per_patent: w0 must be > 0");
  if (!(g > 1.0)) throw std::invalid_argument("class_per_patent: g must be > 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("class_per_patent: alpha must be > 0");
  return w0 * (g - 1.0) / alpha;
}

double generating_function_closed(const ModelParams& params, double z) {
  require_rates(params);
  if (z < 0.0 || z >= 1.0)
    throw std::invalid_argument("generating_function_closed: z must be in [0, 1)");
  const double denom = std::pow(1.0 - z, 1.0 + params.beta) - params.alpha * z;
  if (!(denom > 0.0))
    throw std::invalid_argument("generating_function_closed: z at or beyond the singularity 1/g");
  return 1.0 / denom;
}

std::pair<double, double> identity_check(double beta, long long tau, long long u) {
  if (tau < 1) throw std::invalid_argument("identity_check: tau must be >= 1");
  if (u < 0 || u > tau - 1) throw std::invalid_argument("identity_check: u must be in [0, tau-1]");
  double lhs = 0.0;
  for (long long k = 0; k <= tau - 1 - u; ++k) {
    lhs += gen_binomial(static_cast<double>(k) + beta, k) *
           gen_binomial(static_cast<double>(tau) + u * beta - 2.0 - static_cast<double>(k),
                        tau - 1 - u - k);
  }
  const double rhs =
      gen_binomial((static_cast<double>(u) + 1.0) * beta + static_cast<double>(tau) - 1.0,
                   tau - u - 1);
  return {lhs, rhs};
}

PredictedQuantities predicted_quantities(const ModelParams& params, double w0,
                                         const GrowthSolution& sol) {
  PredictedQuantities q;
  q.w0 = w0;
  q.decline_time_T = decline_time(params.beta, sol.g);
  q.reclass_proportion_V = reclass_proportion(sol.g, params.alpha);
  q.class_per_patent_W = class_per_patent(w0, sol.g, params.alpha);
  return q;
}

}  // namespace reclass
