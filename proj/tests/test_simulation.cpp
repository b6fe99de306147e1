#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "boldcal/random.hpp"
#include "boldcal/simulation.hpp"
#include "support/oracles.hpp"

using namespace boldcal;
using boldcal::testing::ks_p_value;
using boldcal::testing::ks_statistic_uniform;

TEST_CASE("counter stream draws are addressable and uniform") {
  const CounterStream s(CounterStream::derive(42, {1, 2}));
  CHECK(s.bits(17) == CounterStream(s.key()).bits(17));
  CHECK(CounterStream::derive(42, {1, 2}) != CounterStream::derive(42, {2, 1}));
  CHECK(CounterStream::derive(42, {1}) != CounterStream::derive(43, {1}));

  std::vector<double> u(5000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = s.uniform(i);
    REQUIRE(u[i] > 0.0);
    REQUIRE(u[i] < 1.0);
  }
  CHECK(ks_p_value(ks_statistic_uniform(u), u.size()) > 0.01);
}

TEST_CASE("normal_quantile inverts the normal distribution function") {
  for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999, 1 - 1e-9}) {
    const double x = normal_quantile(p);
    CHECK(0.5 * std::erfc(-x / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-13));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(std::isinf(normal_quantile(0.0)));
}

TEST_CASE("forecaster archetypes and names") {
  CHECK(ForecasterSpec::archetype(ForecasterKind::Hedger).gamma == 0.25);
  CHECK(ForecasterSpec::archetype(ForecasterKind::Boaster).gamma == 2.0);
  CHECK(ForecasterSpec::archetype(ForecasterKind::Biased).delta == 2.0);
  CHECK(ForecasterSpec::archetype(ForecasterKind::WellCalibrated).params().is_identity());
  CHECK(ForecasterSpec::archetype(ForecasterKind::Boaster).name() == "boaster");
  CHECK(ForecasterSpec::custom(1.5, 0.5).name() == "custom(1.5;0.5)");
  CHECK(parse_forecaster_kind("well_calibrated") == ForecasterKind::WellCalibrated);
  CHECK_THROWS_AS(parse_forecaster_kind("pessimist"), DomainError);
  CHECK_THROWS_AS(ForecasterSpec::archetype(ForecasterKind::Custom), DomainError);
  CHECK(MCStudyConfig::default_forecasters().size() == 20);
}

TEST_CASE("replicates share truth and outcomes across forecasters") {
  const auto specs = MCStudyConfig::default_forecasters();
  const Replicate rep = generate_replicate(500, specs, 99);
  REQUIRE(rep.predictions.size() == specs.size());
  // noise-free well-calibrated predictions are the true probabilities
  CHECK((rep.predictions[0] == rep.p).all());
  for (std::size_t f = 0; f < specs.size(); ++f) {
    if (specs[f].noise_sigma != 0.0) continue;
    CHECK((rep.predictions[f] == llo_adjust(rep.p, specs[f].params())).all());
  }
  CHECK(((rep.y == 0.0) || (rep.y == 1.0)).all());

  // noisy predictions of one sigma are monotone images of one noisy base
  const Eigen::ArrayXd& wc = rep.predictions[3];  // well_calibrated, sigma 1
  const Eigen::ArrayXd& boast = rep.predictions[13];  // boaster, sigma 1
  REQUIRE(specs[3].noise_sigma == 1.0);
  REQUIRE(specs[13].noise_sigma == 1.0);
  CHECK(((llo_adjust(wc, LLOParams<>{1.0, 2.0}) - boast).abs() < 1e-15).all());
}

TEST_CASE("replicates are reproducible and independent of the spec list") {
  const std::vector<ForecasterSpec> one = {ForecasterSpec::archetype(ForecasterKind::Hedger, 0.5)};
  std::vector<ForecasterSpec> more = one;
  more.insert(more.begin(), ForecasterSpec::archetype(ForecasterKind::Boaster, 0.1));
  const Replicate a = generate_replicate(300, one, 7), b = generate_replicate(300, one, 7);
  const Replicate c = generate_replicate(300, more, 7);
  CHECK((a.predictions[0] == b.predictions[0]).all());
  CHECK((a.predictions[0] == c.predictions[1]).all());
  CHECK((a.y == c.y).all());
  const Replicate d = generate_replicate(300, one, 8);
  CHECK_FALSE((a.p == d.p).all());
}

TEST_CASE("simulated outcomes follow the true probabilities") {
  const Replicate rep = generate_replicate(20000, {ForecasterSpec{}}, 5);
  std::vector<double> p(rep.p.begin(), rep.p.end());
  CHECK(ks_p_value(ks_statistic_uniform(p), p.size()) > 0.01);
  // E[y - p] = 0 with standard error about sqrt(1/6 / n)
  CHECK(std::abs((rep.y - rep.p).mean()) < 4.0 * std::sqrt(1.0 / 6.0 / 20000.0));
}

TEST_CASE("log-odds noise has the requested scale") {
  const double sigma = 0.5;
  const Replicate rep =
      generate_replicate(20000, {ForecasterSpec::archetype(ForecasterKind::WellCalibrated, sigma)}, 6);
  const Eigen::ArrayXd v = clamped_logit(rep.predictions[0]) - clamped_logit(rep.p);
  const double mean = v.mean();
  const double sd = std::sqrt((v - mean).square().sum() / double(v.size() - 1));
  CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(20000.0));
  CHECK(sd == doctest::Approx(sigma).epsilon(0.03));
}

TEST_CASE("generate_replicate validates its input") {
  CHECK_THROWS_AS(generate_replicate(0, {ForecasterSpec{}}, 1), DomainError);
  ForecasterSpec bad;
  bad.noise_sigma = -1.0;
  CHECK_THROWS_AS(generate_replicate(10, {bad}, 1), DomainError);
  bad = ForecasterSpec{};
  bad.delta = 0.0;
  CHECK_THROWS_AS(generate_replicate(10, {bad}, 1), DomainError);
}

TEST_CASE("run_mc_study layout and determinism") {
  MCStudyConfig config;
  config.n_values = {30, 100};
  config.replicates = 4;
  config.forecasters = {ForecasterSpec::archetype(ForecasterKind::WellCalibrated),
                        ForecasterSpec::archetype(ForecasterKind::Biased, 0.1)};
  const StudyTable a = run_mc_study(config, 1), b = run_mc_study(config, 3);
  REQUIRE(a.records.size() == 16);
  for (std::size_t r = 0; r < a.records.size(); ++r) {
    const auto& x = a.records[r];
    CHECK(x.n == (r < 8 ? 30 : 100));
    CHECK(x.replicate == int((r / 2) % 4));
    CHECK(x.forecaster.kind == (r % 2 == 0 ? ForecasterKind::WellCalibrated : ForecasterKind::Biased));
    const auto& y = b.records[r];
    CHECK(std::bit_cast<std::uint64_t>(x.posterior) == std::bit_cast<std::uint64_t>(y.posterior));
    CHECK(std::bit_cast<std::uint64_t>(x.brier) == std::bit_cast<std::uint64_t>(y.brier));
    CHECK(x.posterior >= 0.0);
    CHECK(x.posterior <= 1.0);
  }
  // replicate seeds are reachable directly
  const Replicate rep = generate_replicate(100, config.forecasters, replicate_seed(config.seed, 100, 2));
  const auto& rec = a.records[8 + 2 * 2];
  CHECK(rec.brier == (rep.predictions[0] - rep.y).square().mean());

  config.replicates = 0;
  CHECK_THROWS_AS(run_mc_study(config), DomainError);
}

TEST_CASE("tiny replicates with one outcome class are recorded as diverged") {
  MCStudyConfig config;
  config.n_values = {1};
  config.replicates = 3;
  config.forecasters = {ForecasterSpec{}};
  const StudyTable t = run_mc_study(config, 1);
  for (const auto& r : t.records) {
    CHECK(r.diverged);
    CHECK(r.posterior == 0.0);
    CHECK(std::isnan(r.lrt_p_value));
    CHECK(std::isnan(r.auc));
  }
}
