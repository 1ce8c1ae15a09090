#pragma once

#include <cstdint>

namespace reclass {

/// Generalized binomial coefficient binom(x, k) = x(x-1)...(x-k+1) / k! for
/// real upper index x and integer lower index k >= 0.
///
/// Returns exact 0 whenever the falling factorial contains a zero factor
/// (e.g. binom(3, 5) = 0, binom(tau-1, tau) = 0 for tau >= 1) and 1 for the
/// empty product k = 0 (so binom(-1, 0) = 1). Evaluation is the direct
/// product with interleaved division by i+1; if that overflows, the value is
/// recomputed in log space with sign tracking.
///
/// Throws std::invalid_argument for k < 0.
double gen_binomial(double x, long long k);

/// log Gamma(x) for x > 0. Thin wrapper kept for symmetry with the
/// sign-tracking variant below.
double log_gamma(double x);

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
/// Continued-fraction evaluation (Lentz), accurate to ~1e-14.
double reg_inc_beta(double a, double b, double x);

/// Two-sided p-value of a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Upper tail probability P(F > f) for an F statistic with (d1, d2) degrees
/// of freedom.
double f_dist_upper_p(double f, double d1, double d2);

}  // namespace reclass
