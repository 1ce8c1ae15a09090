#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "reclass/errors.hpp"
#include "reclass/model.hpp"
#include "reclass/simulate.hpp"

using namespace reclass;

namespace {

CohortMatrix unit_run(double alpha, double beta, long long horizon) {
  SimulationConfig config;
  config.params = {alpha, beta};
  config.horizon = horizon;
  return run(config);
}

}  // namespace

TEST_CASE("one step by hand") {
  CohortMatrix state(CountMode::patents, 1.0);
  state.inject(0, 1.0);
  step(state, {0.05, 0.5});
  CHECK(state.cell(1, 0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(state.cell(1, 1) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(state.total(1) == doctest::Approx(1.55).epsilon(1e-15));
}

TEST_CASE("zero rates leave the state unchanged") {
  CohortMatrix state(CountMode::patents, 1.0);
  state.inject(0, 2.0);
  step(state, {0.0, 0.0});
  CHECK(state.cell(1, 0) == 2.0);
  CHECK(state.cell(1, 1) == 0.0);
}

TEST_CASE("a late row matches the closed form") {
  const ModelParams params{0.05, 0.5};
  const CohortMatrix matrix = unit_run(0.05, 0.5, 30);
  for (long long tau = 0; tau <= 30; ++tau) {
    CHECK(matrix.cell(30, tau) == doctest::Approx(exact_cohort_count(params, tau, 30)).epsilon(1e-9));
  }
}

TEST_CASE("run validation and trivial horizons") {
  SimulationConfig config;
  config.horizon = 0;
  config.initial_cohorts = {{0, 2.5}};
  const CohortMatrix matrix = run(config);
  CHECK(matrix.last_time() == 0);
  CHECK(matrix.total(0) == 2.5);

  config.horizon = -1;
  CHECK_THROWS_AS(run(config), std::invalid_argument);
  config.horizon = 10001;
  CHECK_THROWS_AS(run(config), std::invalid_argument);
  config.horizon = 5;
  config.initial_cohorts = {{0, 0.0}};
  CHECK_THROWS_AS(run(config), std::invalid_argument);
  config.initial_cohorts = {{7, 1.0}};
  CHECK_THROWS_AS(run(config), std::invalid_argument);
  config.initial_cohorts = {};
  CHECK_THROWS_AS(run(config), std::invalid_argument);
}

TEST_CASE("late seeds are injected at their filing year") {
  SimulationConfig config;
  config.params = {0.0, 0.0};
  config.horizon = 5;
  config.initial_cohorts = {{0, 1.0}, {3, 2.0}};
  const CohortMatrix matrix = run(config);
  CHECK(matrix.cell(2, 0) == 1.0);
  CHECK(matrix.cell(3, 3) == 2.0);
  CHECK(matrix.total(5) == 3.0);
}

TEST_CASE("ratio of totals converges to the growth factor") {
  const CohortMatrix matrix = unit_run(0.025, 0.4, 200);
  const double g = growth_factor({0.025, 0.4}).g;
  CHECK(matrix.total(200) / matrix.total(199) == doctest::Approx(g).epsilon(1e-4));
}

TEST_CASE("row totals never decrease") {
  const CohortMatrix matrix = unit_run(0.03, 0.6, 80);
  for (long long t = 1; t <= 80; ++t) CHECK(matrix.total(t) >= matrix.total(t - 1));
}

TEST_CASE("profiles and peaks") {
  SUBCASE("t = 0 is a single cell") {
    const CohortMatrix matrix = unit_run(0.05, 0.5, 0);
    CHECK(filing_year_profile(matrix, 0).size() == 1);
  }
  SUBCASE("the interior profile rises to a peak and then dips") {
    // the seeded tau = 0 cohort always dominates tau = 1, so the rise/dip
    // shape lives on 0 < tau <= t
    const CohortMatrix matrix = unit_run(0.05, 0.5, 40);
    const Eigen::VectorXd profile = filing_year_profile(matrix, 40);
    const long long peak = 1 + peak_year(profile.segment(1, 40));
    for (long long tau = 2; tau <= peak; ++tau) CHECK(profile[tau] > profile[tau - 1]);
    for (long long tau = peak + 1; tau <= 40; ++tau) CHECK(profile[tau] < profile[tau - 1]);
    const double expected = decline_time(0.5, growth_factor({0.05, 0.5}).g);
    CHECK(std::abs(static_cast<double>(40 - peak) - expected) <= 1.0);
  }
  SUBCASE("peak lag tracks beta/(g-1) at other parameters") {
    const CohortMatrix matrix = unit_run(0.025, 0.4, 60);
    const Eigen::VectorXd profile = filing_year_profile(matrix, 60);
    const long long peak = 1 + peak_year(profile.segment(1, 60));
    CHECK(60 - peak >= 4);
    CHECK(60 - peak <= 6);
  }
  SUBCASE("tie rule and monotone profiles") {
    Eigen::VectorXd flat = Eigen::VectorXd::Constant(5, 2.0);
    CHECK(peak_year(flat) == 0);
    Eigen::VectorXd rising(4);
    rising << 1.0, 2.0, 3.0, 4.0;
    CHECK(peak_year(rising) == 3);
    CHECK_THROWS_AS(peak_year(Eigen::VectorXd()), std::invalid_argument);
  }
}

TEST_CASE("reclassified totals") {
  SUBCASE("beta = 0 reclassifies nothing") {
    const CohortMatrix matrix = unit_run(0.05, 0.0, 10);
    CHECK(reclassified_total(matrix, {0.05, 0.0}, 10) == 0.0);
  }
  SUBCASE("single cohort at t = 1 by hand") {
    const CohortMatrix matrix = unit_run(0.0, 0.5, 2);
    // only cohort 0 exists; the step leaving t=1 moves 0.5 * n_0(1) / 2
    CHECK(reclassified_total(matrix, {0.0, 0.5}, 1) ==
          doctest::Approx(0.5 * matrix.cell(1, 0) / 2.0).epsilon(1e-15));
    CHECK(matrix.cell(1, 0) == doctest::Approx(1.5).epsilon(1e-15));
  }
  SUBCASE("mass bookkeeping holds at every step") {
    const ModelParams params{0.04, 0.6};
    const CohortMatrix matrix = unit_run(0.04, 0.6, 60);
    for (long long t = 0; t < 60; ++t) {
      const double gain = matrix.total(t + 1) - matrix.total(t);
      const double expected = params.alpha * matrix.total(t) + reclassified_total(matrix, params, t);
      CHECK(gain == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("the ratio converges to the reclassification proportion") {
    const ModelParams params{0.05, 0.5};
    const CohortMatrix matrix = unit_run(0.05, 0.5, 300);
    const double v = reclassified_total(matrix, params, 300) / matrix.total(300);
    CHECK(v == doctest::Approx(growth_factor(params).g - 1.0 - 0.05).epsilon(0.05));
  }
}

TEST_CASE("dynamics are linear in the initial count") {
  const CohortMatrix unit = unit_run(0.05, 0.5, 25);
  SimulationConfig config;
  config.params = {0.05, 0.5};
  config.horizon = 25;
  config.initial_cohorts = {{0, 4.0}};  // powers of two scale without rounding
  const CohortMatrix scaled = run(config);
  for (long long t = 0; t <= 25; ++t) {
    for (long long tau = 0; tau <= t; ++tau) {
      CHECK(scaled.cell(t, tau) == 4.0 * unit.cell(t, tau));
    }
  }
}

TEST_CASE("classification mode tracks unique patents") {
  SimulationConfig config;
  config.params = {0.024, 0.4};
  config.horizon = 200;
  config.mode = CountMode::classifications;
  config.w0 = 1.25;
  const CohortMatrix matrix = run(config);
  CHECK(matrix.introduced_patents(10) == doctest::Approx(matrix.cell(10, 10) / 1.25));
  double patents = 0.0;
  for (long long tau = 0; tau <= 200; ++tau) patents += matrix.introduced_patents(tau);
  const double w = matrix.total(200) / patents;
  const double g = growth_factor(config.params).g;
  CHECK(w == doctest::Approx(1.25 * (g - 1.0) / 0.024).epsilon(0.03));
}

TEST_CASE("overflow is reported") {
  SimulationConfig config;
  config.params = {0.9, 0.0};
  config.horizon = 1500;
  CHECK_THROWS_AS(run(config), NumericalError);
}

TEST_CASE("emitted reclassification events") {
  SUBCASE("beta = 0 yields all-zero events") {
    const CohortMatrix matrix = unit_run(0.05, 0.0, 20);
    const ReclassEventStream stream = emit_reclass_events(matrix, {0.05, 0.0}, {10});
    CHECK(!stream.records.empty());
    for (const auto& rec : stream.records) CHECK(rec.reclassified == 0.0);
  }
  SUBCASE("single cohort matches the hand-computed lag sum") {
    const CohortMatrix matrix = unit_run(0.0, 0.5, 8);
    const ReclassEventStream stream = emit_reclass_events(matrix, {0.0, 0.5}, {5});
    REQUIRE(stream.records.size() == 1);
    const auto& rec = stream.records[0];
    CHECK(rec.filing_year == 0);
    CHECK(rec.event_year == 5);
    CHECK(rec.classifications_before == doctest::Approx(matrix.cell(4, 0)));
    // yearly gains are beta/(t - tau) of the preceding stock: lags 5, 6, 7
    const double expected = 0.5 * (1.0 / 5.0 + 1.0 / 6.0 + 1.0 / 7.0);
    CHECK(rec.reclassified / rec.classifications_before ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("window bounds are validated") {
    const CohortMatrix matrix = unit_run(0.05, 0.5, 10);
    CHECK_THROWS_AS(emit_reclass_events(matrix, {0.05, 0.5}, {9}), std::invalid_argument);
    CHECK_THROWS_AS(emit_reclass_events(matrix, {0.05, 0.5}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(emit_reclass_events(matrix, {0.05, 0.5}, {5}, 0), std::invalid_argument);
  }
}
