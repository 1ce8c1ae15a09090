#pragma once

#include <utility>

namespace reclass {

/// Parameters of the cohort dynamics: each year a class gains alpha * n(t)
/// newly filed items, and every existing filing-year cohort tau grows by
/// reclassification at rate beta * n_tau(t) / (t - tau + 1).
///
/// alpha must lie in (0, 1) wherever the asymptotic growth factor enters
/// (growth_factor, slow_growth_approx); the exact solutions and the
/// simulator accept any alpha >= 0.
struct ModelParams {
  double alpha = 0.0;  ///< triggering rate per year
  double beta = 0.0;   ///< reclassification rate per year
};

/// Solution of the growth-factor equation (1 - 1/g)^(1+beta) = alpha / g.
struct GrowthSolution {
  double g = 0.0;         ///< asymptotic yearly growth factor, in [1+alpha, 1+alpha+beta)
  double n0 = 0.0;        ///< asymptotic prefactor n(t) ~ n0 * g^t; NaN until estimated
  double residual = 0.0;  ///< value of (1-1/g)^(1+beta) - alpha/g at the returned root
};

/// Closed-form quantities implied by (alpha, beta, g, w0).
struct PredictedQuantities {
  double decline_time_T = 0.0;        ///< years between apparent peak and present, beta/(g-1)
  double reclass_proportion_V = 0.0;  ///< yearly reclassified fraction of the stock, g-1-alpha
  double class_per_patent_W = 0.0;    ///< asymptotic classifications per patent, w0*(g-1)/alpha
  double w0 = 0.0;                    ///< classifications per patent at introduction
};

/// Cohort count propagated from its introduction value:
/// n_tau(t) = binom(t - tau + beta, t - tau) * n_intro.
/// Requires t >= tau and n_intro >= 0.
double cohort_from_intro(const ModelParams& params, double n_intro, long long tau, long long t);

/// Exact cohort count for the canonical initial condition n_tau(0) = delta_{0,tau}:
/// n_tau(t) = binom(t - tau + beta, t - tau) * sum_{u=0}^{tau} binom(u*beta + tau - 1, tau - u) alpha^u.
/// Requires t >= tau >= 0.
double exact_cohort_count(const ModelParams& params, long long tau, long long t);

/// Exact total n(t) = sum_{u=0}^{t} binom((u+1)*beta + t, t - u) alpha^u for the
/// canonical initial condition; equals the sum of exact_cohort_count over tau.
double exact_total(const ModelParams& params, long long t);

/// Solves (1 - 1/g)^(1+beta) = alpha/g on the bracket [1+alpha, 1+alpha+beta]
/// by bisection until the bracket width is <= tol (at most 200 iterations).
/// The left side minus the right side is strictly increasing on the bracket,
/// so the root is unique. beta = 0 short-circuits to the exact g = 1 + alpha.
///
/// Requires 0 < alpha < 1, beta >= 0, tol > 0. Throws NumericalError if the
/// bracket fails to straddle a sign change at working precision. The returned
/// n0 is NaN; see estimate_prefactor.
GrowthSolution growth_factor(const ModelParams& params, double tol = 1e-12);

/// Slow-growth closed form g ~ 1 + alpha^(1/(1+beta)), valid for g-1 << 1 and
/// alpha << 1. Requires alpha > 0, beta >= 0.
double slow_growth_approx(const ModelParams& params);

/// Decline time T = beta / (g - 1): the lag between the apparent peak filing
/// year and the present. Requires g > 1, beta >= 0.
double decline_time(double beta, double g);

/// Reclassification proportion V = g - 1 - alpha: the asymptotic fraction of
/// the stock added per year by reclassification. Requires g >= 1 + alpha.
double reclass_proportion(double g, double alpha);

/// Classifications per patent W = w0 * (g - 1) / alpha.
/// Requires w0 > 0, g > 1, alpha > 0.
double class_per_patent(double w0, double g, double alpha);

/// Closed form of the generating function G(z) = sum_t n(t) z^t:
/// G(z) = 1 / ((1-z)^(1+beta) - alpha*z), defined for z in [0, 1/g) where the
/// denominator is positive. Rejects z outside that range.
double generating_function_closed(const ModelParams& params, double z);

/// Both sides of the binomial convolution identity used by the exact solution:
///   lhs = sum_{k=0}^{tau-1-u} binom(k + beta, k) * binom(tau + u*beta - 2 - k, tau - 1 - u - k)
///   rhs = binom((u+1)*beta + tau - 1, tau - u - 1)
/// for integer tau >= 1 and integer u in [0, tau-1]. Test oracle.
std::pair<double, double> identity_check(double beta, long long tau, long long u);

/// Bundles the closed-form predictions for a solved growth factor.
PredictedQuantities predicted_quantities(const ModelParams& params, double w0, const GrowthSolution& sol);

}  // namespace reclass
