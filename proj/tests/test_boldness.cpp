#include <doctest.h>

#include <cmath>
#include <fstream>

#include "boldcal/assessment.hpp"
#include "boldcal/boldness.hpp"
#include "boldcal/csv.hpp"
#include "boldcal/simulation.hpp"
#include "support/oracles.hpp"

using namespace boldcal;
using boldcal::testing::draw_llo_outcomes;
using boldcal::testing::sample_sd;

namespace {

PredictionSet twenty() {
  return PredictionSet(boldcal::testing::twenty_x(), boldcal::testing::twenty_y());
}

GridSpec twenty_spec() { return GridSpec::make(0.25, 4.0, -0.5, 3.5, 25); }

GridOptions refit_options() {
  GridOptions o;
  o.likelihood = CellLikelihood::Refit;
  return o;
}

}  // namespace

TEST_CASE("spread") {
  Eigen::ArrayXd a(2), b(3), c(4), one(1);
  a << 0.0, 1.0;
  b << 0.25, 0.5, 0.75;
  c << 0.3, 0.3, 0.3, 0.3;
  one << 0.4;
  CHECK(spread(a) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK(spread(b) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(spread(c) == 0.0);
  CHECK(spread(one) == 0.0);
  CHECK(spread(boldcal::testing::twenty_x()) ==
        doctest::Approx(sample_sd(boldcal::testing::twenty_x())).epsilon(1e-14));
}

TEST_CASE("GridSpec::make") {
  const auto spec = GridSpec::make(0.1, 10.0, -1.0, 3.0, 5);
  REQUIRE(spec.delta_values.size() == 5);
  CHECK(spec.delta_values.front() == 0.1);
  CHECK(spec.delta_values.back() == 10.0);
  CHECK(spec.delta_values[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spec.gamma_values[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(spec.gamma_values.back() == 3.0);
  const auto single = GridSpec::make(2.0, 2.0, 1.0, 1.0, 1);
  CHECK(single.delta_values == std::vector<double>{2.0});
  CHECK_THROWS_AS(GridSpec::make(0.0, 1.0, 0.0, 1.0, 3), DomainError);
  CHECK_THROWS_AS(GridSpec::make(1.0, 2.0, 0.0, 1.0, 0), DomainError);
  CHECK_THROWS_AS(GridSpec::make(1.0, 1.0, 0.0, 1.0, 3), DomainError);
}

TEST_CASE("identity cell reproduces the posterior of the data itself") {
  const PredictionSet data = twenty();
  GridSpec spec;
  spec.delta_values = {0.5, 1.0, 2.0};
  spec.gamma_values = {0.5, 1.0, 2.0};
  const double expected = posterior_calibration(data).posterior_calibrated;
  for (const auto& options : {GridOptions{}, refit_options()}) {
    const ContourGrid grid = evaluate_grid(data, spec, options);
    CHECK(grid.posterior(1, 1) == expected);
    CHECK(grid.spread(1, 1) == spread(data.x()));
    CHECK(grid.cell_status(1, 1) == CellStatus::Ok);
  }
}

TEST_CASE("refit cells equal posterior_calibration on the adjusted set") {
  const PredictionSet data = twenty();
  GridSpec spec;
  spec.delta_values = {0.4, 1.3, 3.0};
  spec.gamma_values = {-0.7, 0.6, 2.2};
  const ContourGrid grid = evaluate_grid(data, spec, refit_options());
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const PredictionSet adjusted = data.with_predictions(llo_adjust(data.x(), grid.params(i, j)));
      CHECK(grid.posterior(i, j) == posterior_calibration(adjusted).posterior_calibrated);
      CHECK(grid.spread(i, j) == spread(adjusted.x()));
    }
  }
}

TEST_CASE("gamma = 0 collapses the predictions") {
  const PredictionSet data = twenty();
  GridSpec spec;
  spec.delta_values = {0.5, 1.0, 2.0};
  spec.gamma_values = {0.0};
  for (const auto& options : {GridOptions{}, refit_options()}) {
    const ContourGrid grid = evaluate_grid(data, spec, options);
    for (Eigen::Index i = 0; i < 3; ++i) {
      CHECK(grid.spread(i, 0) == 0.0);
      // constant predictions fit the base rate exactly, and the 0.5 base
      // rate of this set means delta = 1 is the calibrated collapse
      CHECK(grid.posterior(i, 0) > 0.0);
    }
    CHECK(grid.posterior(1, 0) > grid.posterior(0, 0));
    CHECK(grid.posterior(1, 0) > grid.posterior(2, 0));
  }
}

TEST_CASE("25 x 25 grid matches the reference computation") {
  std::ifstream in(std::string(BOLDCAL_SOURCE_DIR) + "/tests/data/grid_twenty_25.csv");
  REQUIRE(in.good());
  const CsvTable table = read_csv(in);
  REQUIRE(table.rows.size() == 625);
  const auto dc = table.column("delta"), gc = table.column("gamma");
  const auto pc = table.column("posterior"), sc = table.column("spread");

  const PredictionSet data = twenty();
  const ContourGrid refit = evaluate_grid(data, twenty_spec(), refit_options());
  const ContourGrid fast = evaluate_grid(data, twenty_spec());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r / 25), j = static_cast<Eigen::Index>(r % 25);
    const auto& row = table.rows[r];
    CHECK(refit.delta_values[i] == doctest::Approx(std::stod(row[dc])).epsilon(1e-14));
    CHECK(refit.gamma_values[j] == doctest::Approx(std::stod(row[gc])).epsilon(1e-14));
    const double p = std::stod(row[pc]), s = std::stod(row[sc]);
    CHECK(std::abs(refit.posterior(i, j) - p) < 1e-9);
    CHECK(std::abs(fast.posterior(i, j) - p) < 1e-9);
    CHECK(refit.spread(i, j) == doctest::Approx(s).epsilon(1e-12));
    CHECK(fast.spread(i, j) == refit.spread(i, j));
  }
}

TEST_CASE("boldness selections on the 25 x 25 grid") {
  const PredictionSet data = twenty();
  const ContourGrid grid = evaluate_grid(data, twenty_spec());
  struct Expected {
    double t;
    Eigen::Index i, j;
    double spread;
  };
  for (const Expected e : {Expected{0.8, 8, 22, 0.435242286975244},
                           Expected{0.9, 6, 18, 0.414488705806261},
                           Expected{0.95, 8, 13, 0.365904409151865}}) {
    const BoldnessResult r = boldness_recalibrate(data, e.t, grid);
    CHECK(r.feasible);
    CHECK(r.delta_index == e.i);
    CHECK(r.gamma_index == e.j);
    CHECK(r.achieved_spread == doctest::Approx(e.spread).epsilon(1e-12));
    CHECK(r.achieved_posterior >= e.t);
    CHECK(spread(r.recalibrated) == r.achieved_spread);
  }
}

TEST_CASE("boldness: larger t never yields more spread") {
  const PredictionSet data = twenty();
  const ContourGrid grid = evaluate_grid(data, twenty_spec());
  double prev = INFINITY;
  for (double t = 0.05; t < 0.96; t += 0.05) {
    const BoldnessResult r = boldness_recalibrate(data, t, grid);
    if (!r.feasible) break;
    CHECK(r.achieved_spread <= prev);
    prev = r.achieved_spread;
  }
}

TEST_CASE("boldness: infeasible floor falls back to the most probable cell") {
  const PredictionSet data = twenty();
  const ContourGrid grid = evaluate_grid(data, twenty_spec());
  const BoldnessResult r = boldness_recalibrate(data, 0.999999, grid);
  CHECK_FALSE(r.feasible);
  CHECK(r.achieved_posterior == grid.posterior.maxCoeff());
  CHECK_THROWS_AS(boldness_recalibrate(data, 0.0, grid), DomainError);
  CHECK_THROWS_AS(boldness_recalibrate(data, 1.0, grid), DomainError);
}

TEST_CASE("boldness: ties prefer higher posterior, then gamma near 1") {
  const PredictionSet data = twenty();
  ContourGrid grid;
  grid.delta_values = {1.0};
  grid.gamma_values = {0.2, 1.5, 2.0};
  grid.posterior.resize(1, 3);
  grid.spread.resize(1, 3);
  grid.status.assign(3, CellStatus::Ok);
  grid.posterior << 0.9, 0.9, 0.95;
  grid.spread << 0.3, 0.3, 0.2;
  CHECK(boldness_recalibrate(data, 0.5, grid).gamma_index == 1);
  grid.posterior << 0.9, 0.8, 0.95;
  CHECK(boldness_recalibrate(data, 0.5, grid).gamma_index == 0);
}

TEST_CASE("refined grid around the MLE") {
  const PredictionSet data = twenty();
  const MLEFit mle = fit_mle(data);
  RefineOptions opts;
  opts.k = 41;
  const GridSpec spec = refine_grid(data, mle, opts);
  CHECK_FALSE(spec.warning.has_value());
  CHECK(spec.delta_values.front() < 1.0);
  CHECK(spec.delta_values.back() > 1.0);
  CHECK(spec.gamma_values.front() < 1.0);
  CHECK(spec.gamma_values.back() > 1.0);

  const ContourGrid grid = evaluate_grid(data, spec);
  // the MLE itself is the centre cell and must be feasible at its own posterior
  const BoldnessResult r = boldness_recalibrate(data, grid.posterior(20, 20), grid);
  CHECK(r.feasible);
  CHECK(grid.posterior(20, 20) == doctest::Approx(1.0 - 1.0 / 21.0).epsilon(1e-8));

  RefineOptions tight = opts;
  tight.max_doublings = 0;
  CHECK(refine_grid(data, mle, tight).warning.has_value());
}

TEST_CASE("MLE recalibration of hedged forecasts undoes the hedge") {
  // hedged x = c(p; 1, 1/4); its recalibrating gamma is about 4
  auto [p, y] = draw_llo_outcomes(5000, 1.0, 1.0, 31);
  const Eigen::ArrayXd x = llo_adjust(p, LLOParams<>{1.0, 0.25});
  const MLEFit fit = fit_mle(PredictionSet(x, y));
  CHECK(std::abs(fit.params.gamma - 4.0) < 0.5);
  CHECK(std::abs(std::log(fit.params.delta)) < 0.2);
}

TEST_CASE("emboldening expands calibrated forecasts and reins in noisy ones") {
  {
    auto [x, y] = draw_llo_outcomes(868, 1.0, 1.0, 3);
    const PredictionSet data(x, y);
    const MLEFit mle = fit_mle(data);
    RefineOptions opts;
    opts.k = 60;
    const BoldnessResult r =
        boldness_recalibrate(data, 0.95, refine_grid(data, mle, opts), opts.grid);
    CHECK(r.feasible);
    CHECK(r.achieved_spread > spread(x));
  }
  {
    // predictions carry no information about the outcomes
    auto [x, ignored] = draw_llo_outcomes(800, 1.0, 1.0, 4);
    auto [p, y] = draw_llo_outcomes(800, 1.0, 1.0, 5);
    const PredictionSet data(x, y);
    const MLEFit mle = fit_mle(data);
    CHECK(spread(llo_adjust(x, mle.params)) < spread(x));
  }
}

TEST_CASE("grid evaluation does not depend on the worker count") {
  auto [x, y] = draw_llo_outcomes(300, 1.2, 0.9, 12);
  const PredictionSet data(x, y);
  const GridSpec spec = GridSpec::make(0.3, 3.0, -1.0, 3.0, 12);
  GridOptions one, four;
  one.workers = 1;
  four.workers = 4;
  const ContourGrid a = evaluate_grid(data, spec, one), b = evaluate_grid(data, spec, four);
  CHECK((a.posterior == b.posterior).all());
  CHECK((a.spread == b.spread).all());
  CHECK(a.status == b.status);
}

TEST_CASE("single-class data marks every cell diverged") {
  Eigen::ArrayXd x(3), y(3);
  x << 0.2, 0.5, 0.7;
  y << 1, 1, 1;
  const ContourGrid grid = evaluate_grid(PredictionSet(x, y), GridSpec::make(0.5, 2.0, 0.5, 2.0, 3));
  CHECK((grid.posterior == 0.0).all());
  for (auto s : grid.status) CHECK(s == CellStatus::Diverged);
}

TEST_CASE("emboldening expands lightly noised hedged forecasts") {
  const ForecasterSpec hedger = ForecasterSpec::archetype(ForecasterKind::Hedger, 0.1);
  const Replicate rep = generate_replicate(868, {hedger}, 21);
  const PredictionSet data(rep.predictions[0], rep.y);
  RefineOptions opts;
  opts.k = 60;
  const BoldnessResult r =
      boldness_recalibrate(data, 0.95, refine_grid(data, fit_mle(data), opts), opts.grid);
  CHECK(r.feasible);
  CHECK(r.achieved_spread > spread(data.x()));
}
