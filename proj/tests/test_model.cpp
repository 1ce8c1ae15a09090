#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>
#include <vector>
#include <stdexcept>

#include "reclass/errors.hpp"
#include "reclass/model.hpp"
#include "reclass/simulate.hpp"

using namespace reclass;

TEST_CASE("cohort propagation from the introduction value") {
  // two recurrence steps by hand: 1 -> 1.5 -> 1.875
  CHECK(cohort_from_intro({0.0, 0.5}, 1.0, 0, 2) == doctest::Approx(1.875).epsilon(1e-15));
  CHECK(cohort_from_intro({0.1, 0.9}, 1.0, 5, 5) == 1.0);
  CHECK(cohort_from_intro({0.0, 0.0}, 3.0, 0, 10) == 3.0);
  CHECK_THROWS_AS(cohort_from_intro({0.1, 0.5}, 1.0, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(cohort_from_intro({0.1, 0.5}, -1.0, 0, 2), std::invalid_argument);
}

TEST_CASE("exact cohort counts at small times") {
  const ModelParams params{0.05, 0.5};
  CHECK(exact_cohort_count(params, 0, 0) == 1.0);
  CHECK(exact_cohort_count(params, 1, 1) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK_THROWS_AS(exact_cohort_count(params, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(exact_cohort_count(params, -1, 1), std::invalid_argument);
}

TEST_CASE("exact totals at small times") {
  const ModelParams params{0.05, 0.5};
  CHECK(exact_total(params, 0) == 1.0);
  CHECK(exact_total(params, 1) == doctest::Approx(1.55).epsilon(1e-15));
}

TEST_CASE("exact solutions equal the forward recurrence") {
  const ModelParams params{0.05, 0.5};
  SimulationConfig config;
  config.params = params;
  config.horizon = 40;
  const CohortMatrix matrix = run(config);

  CHECK(exact_cohort_count(params, 3, 12) ==
        doctest::Approx(matrix.cell(12, 3)).epsilon(1e-9));
  for (long long t = 0; t <= 40; ++t) {
    for (long long tau = 0; tau <= t; ++tau) {
      CHECK(exact_cohort_count(params, tau, t) ==
            doctest::Approx(matrix.cell(t, tau)).epsilon(1e-9));
    }
  }
  CHECK(exact_total(params, 30) == doctest::Approx(matrix.total(30)).epsilon(1e-9));
}

TEST_CASE("total equals the cohort sum") {
  for (const double beta : {0.0, 0.4, 1.0}) {
    const ModelParams params{0.05, beta};
    for (const long long t : {0LL, 5LL, 25LL, 60LL}) {
      double sum = 0.0;
      for (long long tau = 0; tau <= t; ++tau) sum += exact_cohort_count(params, tau, t);
      CHECK(exact_total(params, t) == doctest::Approx(sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("growth factor solves the root equation") {
  SUBCASE("beta = 0 reduces to pure triggering") {
    const GrowthSolution sol = growth_factor({0.05, 0.0});
    CHECK(sol.g == 1.05);
    CHECK(sol.residual == 0.0);
  }
  SUBCASE("paper band: alpha in [0.024, 0.027], beta = 0.4") {
    for (const double alpha : {0.024, 0.025, 0.027}) {
      const double g = growth_factor({alpha, 0.4}).g;
      CHECK(g > 1.07);
      CHECK(g < 1.08);
    }
  }
  SUBCASE("root satisfies the defining equation") {
    const GrowthSolution sol = growth_factor({0.05, 0.5}, 1e-13);
    CHECK(sol.g == doctest::Approx(1.142).epsilon(1e-3));
    CHECK(std::abs(std::pow(1.0 - 1.0 / sol.g, 1.5) - 0.05 / sol.g) < 1e-12);
    CHECK(std::abs(sol.residual) < 1e-12);
  }
  SUBCASE("asymptotic ratio of exact totals converges to g across the grid") {
    for (const double alpha : {0.01, 0.025, 0.05, 0.1}) {
      for (const double beta : {0.0, 0.1, 0.4, 0.5, 1.0}) {
        const ModelParams params{alpha, beta};
        const double g = growth_factor(params).g;
        const double ratio = exact_total(params, 201) / exact_total(params, 200);
        CHECK(ratio == doctest::Approx(g).epsilon(1e-4));
      }
    }
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(growth_factor({0.0, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(growth_factor({1.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(growth_factor({0.1, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(growth_factor({0.1, 0.4}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("growth factor bounds and monotonicity") {
  std::mt19937 rng(555);
  const auto draw = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng()) + 1.0) / 4294967297.0;
  };
  for (int i = 0; i < 60; ++i) {
    const double alpha = draw(0.0, 0.2);
    const double beta = draw(0.0, 1.0);
    const double g = growth_factor({alpha, beta}).g;
    CHECK(g >= 1.0 + alpha);
    CHECK(g < 1.0 + alpha + beta);
    CHECK(growth_factor({alpha * 1.1 + 1e-6, beta}).g > g);
    CHECK(growth_factor({alpha, beta + 0.1}).g > g);
  }
}

TEST_CASE("slow growth closed form") {
  CHECK(slow_growth_approx({1e-4, 0.0}) == doctest::Approx(1.0001).epsilon(1e-15));
  CHECK(slow_growth_approx({0.01, 1.0}) == doctest::Approx(1.1).epsilon(1e-15));
  const double approx = slow_growth_approx({1e-4, 0.4});
  CHECK(approx == doctest::Approx(1.0 + std::pow(10.0, -4.0 / 1.4)).epsilon(1e-15));
  const double g = growth_factor({1e-4, 0.4}, 1e-14).g;
  CHECK(std::abs((g - 1.0) - (approx - 1.0)) <= 0.10 * (approx - 1.0));
}

TEST_CASE("decline time") {
  CHECK(decline_time(0.4, 1.079) == doctest::Approx(5.06).epsilon(0.01));
  CHECK(decline_time(0.6, 1.079) == doctest::Approx(7.59).epsilon(0.01));
  CHECK(decline_time(0.0, 1.3) == 0.0);
  CHECK_THROWS_AS(decline_time(0.4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(decline_time(-0.1, 1.1), std::invalid_argument);
}

TEST_CASE("reclassification proportion") {
  CHECK(reclass_proportion(1.08, 0.024) == doctest::Approx(0.056).epsilon(1e-12));
  CHECK(reclass_proportion(1.5, 0.5) == 0.0);  // g = 1 + alpha, binary-exact inputs
  CHECK_THROWS_AS(reclass_proportion(1.02, 0.03), std::invalid_argument);
}

TEST_CASE("classifications per patent") {
  CHECK(class_per_patent(1.25, 1.079, 0.027) == doctest::Approx(3.6574).epsilon(1e-4));
  CHECK(class_per_patent(1.25, 1.079, 0.024) == doctest::Approx(4.1146).epsilon(1e-4));
  CHECK(class_per_patent(1.0, 1.5, 0.5) == 1.0);  // g = 1 + alpha keeps W = W0
  // subclass-level inputs give [2.05, 2.30]
  CHECK(class_per_patent(0.7, 1.079, 0.024) == doctest::Approx(2.3042).epsilon(1e-4));
  CHECK(class_per_patent(0.7, 1.079, 0.027) == doctest::Approx(2.0481).epsilon(1e-4));
  CHECK_THROWS_AS(class_per_patent(0.0, 1.1, 0.02), std::invalid_argument);
}

namespace {

double truncated_series(const ModelParams& params, double z, long long terms) {
  double sum = 0.0;
  double zt = 1.0;
  for (long long t = 0; t <= terms; ++t) {
    sum += exact_total(params, t) * zt;
    zt *= z;
  }
  return sum;
}

}  // namespace

TEST_CASE("generating function closed form vs truncated series") {
  const ModelParams params{0.05, 0.5};
  CHECK(generating_function_closed(params, 0.0) == 1.0);
  CHECK(generating_function_closed(params, 0.5) == doctest::Approx(3.0437).epsilon(1e-4));
  CHECK(generating_function_closed(params, 0.5) ==
        doctest::Approx(truncated_series(params, 0.5, 400)).epsilon(1e-6));

  const ModelParams late{0.025, 0.4};
  const double z = 0.9 / growth_factor(late).g;
  CHECK(generating_function_closed(late, z) ==
        doctest::Approx(truncated_series(late, z, 400)).epsilon(1e-6));

  const double g = growth_factor(params).g;
  CHECK_THROWS_AS(generating_function_closed(params, 1.0 / g + 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(generating_function_closed(params, 0.999), std::invalid_argument);
  CHECK_THROWS_AS(generating_function_closed(params, -0.1), std::invalid_argument);
}

TEST_CASE("binomial convolution identity") {
  SUBCASE("tau = 1 reduces to binom(beta, 0) = 1") {
    const auto [lhs, rhs] = identity_check(0.5, 1, 0);
    CHECK(lhs == 1.0);
    CHECK(rhs == 1.0);
  }
  SUBCASE("fractional beta") {
    const auto [lhs, rhs] = identity_check(0.5, 4, 1);
    CHECK(lhs == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
  SUBCASE("integer beta is exact") {
    const auto [lhs, rhs] = identity_check(2.0, 5, 2);
    CHECK(lhs == 45.0);
    CHECK(rhs == 45.0);
  }
  SUBCASE("randomized") {
    std::mt19937 rng(2468);
    for (int i = 0; i < 40; ++i) {
      const double beta = 3.0 * (static_cast<double>(rng()) + 1.0) / 4294967297.0;
      const long long tau = 1 + static_cast<long long>(rng() % 12);
      const long long u = static_cast<long long>(rng() % static_cast<unsigned long>(tau));
      const auto [lhs, rhs] = identity_check(beta, tau, u);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(identity_check(0.5, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(identity_check(0.5, 3, 3), std::invalid_argument);
}

TEST_CASE("operations are safe to call from several threads") {
  // pure functions of their inputs: concurrent sweeps must agree with serial
  const std::vector<double> alphas = {0.01, 0.025, 0.05, 0.1};
  std::vector<double> serial(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    serial[i] = growth_factor({alphas[i], 0.4}).g + exact_total({alphas[i], 0.4}, 40);
  }
  std::vector<double> parallel(alphas.size());
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    workers.emplace_back([&, i] {
      parallel[i] = growth_factor({alphas[i], 0.4}).g + exact_total({alphas[i], 0.4}, 40);
    });
  }
  for (auto& w : workers) w.join();
  for (std::size_t i = 0; i < alphas.size(); ++i) CHECK(parallel[i] == serial[i]);
}

TEST_CASE("predicted quantities bundle") {
  const ModelParams params{0.024, 0.4};
  const GrowthSolution sol = growth_factor(params);
  const PredictedQuantities q = predicted_quantities(params, 1.25, sol);
  CHECK(q.decline_time_T == doctest::Approx(0.4 / (sol.g - 1.0)));
  CHECK(q.reclass_proportion_V == doctest::Approx(sol.g - 1.0 - 0.024));
  CHECK(q.class_per_patent_W == doctest::Approx(1.25 * (sol.g - 1.0) / 0.024));
}
