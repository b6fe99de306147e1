#include "boldcal/simulation.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "boldcal/assessment.hpp"
#include "boldcal/errors.hpp"
#include "boldcal/parallel.hpp"
#include "boldcal/random.hpp"

namespace boldcal {

namespace {

// substream tags
constexpr std::uint64_t kTagTruth = 1;
constexpr std::uint64_t kTagOutcome = 2;
constexpr std::uint64_t kTagNoise = 3;

}  // namespace

ForecasterSpec ForecasterSpec::archetype(ForecasterKind kind, double noise_sigma) {
  switch (kind) {
    case ForecasterKind::WellCalibrated: return {kind, 1.0, 1.0, noise_sigma};
    case ForecasterKind::Hedger: return {kind, 1.0, 0.25, noise_sigma};
    case ForecasterKind::Boaster: return {kind, 1.0, 2.0, noise_sigma};
    case ForecasterKind::Biased: return {kind, 2.0, 1.0, noise_sigma};
    case ForecasterKind::Custom: break;
  }
  throw DomainError("custom forecasters need explicit parameters");
}

ForecasterSpec ForecasterSpec::custom(double delta, double gamma, double noise_sigma) {
  check_params(LLOParams<double>{delta, gamma});
  return {ForecasterKind::Custom, delta, gamma, noise_sigma};
}

std::string ForecasterSpec::name() const {
  if (kind != ForecasterKind::Custom) return std::string(to_string(kind));
  std::ostringstream os;
  os.precision(12);
  os << "custom(" << delta << ";" << gamma << ")";
  return os.str();
}

std::string_view to_string(ForecasterKind kind) {
  switch (kind) {
    case ForecasterKind::WellCalibrated: return "well_calibrated";
    case ForecasterKind::Hedger: return "hedger";
    case ForecasterKind::Boaster: return "boaster";
    case ForecasterKind::Biased: return "biased";
    case ForecasterKind::Custom: return "custom";
  }
  return "unknown";
}

ForecasterKind parse_forecaster_kind(std::string_view name) {
  for (auto kind : {ForecasterKind::WellCalibrated, ForecasterKind::Hedger,
                    ForecasterKind::Boaster, ForecasterKind::Biased}) {
    if (name == to_string(kind)) return kind;
  }
  throw DomainError("unknown forecaster type '" + std::string(name) +
                    "' (expected well_calibrated, hedger, boaster or biased)");
}

Replicate generate_replicate(int n, const std::vector<ForecasterSpec>& specs, std::uint64_t seed) {
  if (n < 1) throw DomainError("replicate size must be at least 1");
  for (const auto& s : specs) {
    check_params(s.params());
    if (!(s.noise_sigma >= 0.0) || !std::isfinite(s.noise_sigma)) {
      throw DomainError("noise sigma must be a finite non-negative number");
    }
  }

  Replicate rep;
  rep.p.resize(n);
  rep.y.resize(n);
  const CounterStream truth(CounterStream::derive(seed, {kTagTruth}));
  const CounterStream outcome(CounterStream::derive(seed, {kTagOutcome}));
  for (int i = 0; i < n; ++i) {
    rep.p(i) = truth.uniform(static_cast<std::uint64_t>(i));
    rep.y(i) = outcome.uniform(static_cast<std::uint64_t>(i)) < rep.p(i) ? 1.0 : 0.0;
  }

  // noisy base per distinct sigma, keyed by the sigma bit pattern
  std::map<double, Eigen::ArrayXd> noisy;
  for (const auto& s : specs) {
    if (noisy.contains(s.noise_sigma)) continue;
    if (s.noise_sigma == 0.0) {
      noisy.emplace(s.noise_sigma, rep.p);
      continue;
    }
    const CounterStream noise(
        CounterStream::derive(seed, {kTagNoise, std::bit_cast<std::uint64_t>(s.noise_sigma)}));
    Eigen::ArrayXd base(n);
    for (int i = 0; i < n; ++i) {
      const double v = s.noise_sigma * normal_quantile(noise.uniform(static_cast<std::uint64_t>(i)));
      // e^v p / ((1 - p) + e^v p), i.e. a shift of v on the log-odds scale
      base(i) = sigmoid(logit(rep.p(i)) + v);
    }
    noisy.emplace(s.noise_sigma, std::move(base));
  }

  rep.predictions.reserve(specs.size());
  for (const auto& s : specs) rep.predictions.push_back(llo_adjust(noisy.at(s.noise_sigma), s.params()));
  return rep;
}

std::vector<ForecasterSpec> MCStudyConfig::default_forecasters() {
  std::vector<ForecasterSpec> out;
  for (auto kind : {ForecasterKind::WellCalibrated, ForecasterKind::Hedger,
                    ForecasterKind::Boaster, ForecasterKind::Biased}) {
    for (double sigma : kDefaultNoiseLevels) out.push_back(ForecasterSpec::archetype(kind, sigma));
  }
  return out;
}

void MCStudyConfig::validate() const {
  if (n_values.empty()) throw DomainError("study needs at least one sample size");
  for (int n : n_values) {
    if (n < 1) throw DomainError("sample sizes must be positive");
  }
  if (replicates < 1) throw DomainError("study needs at least one replicate");
  if (forecasters.empty()) throw DomainError("study needs at least one forecaster");
}

std::uint64_t replicate_seed(std::uint64_t study_seed, int n, int replicate) {
  return CounterStream::derive(study_seed,
                               {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replicate)});
}

namespace {

StudyRecord assess_cell(int n, int replicate, const ForecasterSpec& spec, const PredictionSet& data) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  StudyRecord r;
  r.n = n;
  r.replicate = replicate;
  r.forecaster = spec;
  const ScoreReport scores = score_report(data);
  r.brier = scores.brier;
  r.brier_calibration = scores.brier_calibration;
  r.ece = scores.ece;
  r.auc = scores.auc.value_or(kNaN);
  try {
    MLEFit fit;
    try {
      fit = fit_mle(data);
    } catch (const NonConvergenceError& e) {
      fit = e.best();
    }
    r.posterior = bayes_assessment(data.size(), fit.loglik_at_null, fit.loglik_at_mle).posterior_calibrated;
    r.lrt_p_value = lrt_from_fit(fit).p_value;
  } catch (const DivergenceError&) {
    r.diverged = true;
    r.posterior = 0.0;
    r.lrt_p_value = kNaN;
  }
  return r;
}

}  // namespace

StudyTable run_mc_study(const MCStudyConfig& config, unsigned workers) {
  config.validate();
  const std::size_t per_replicate = config.forecasters.size();
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  const std::size_t jobs = config.n_values.size() * reps;

  StudyTable table;
  table.records.resize(jobs * per_replicate);
  parallel_for(
      jobs,
      [&](std::size_t job) {
        const int n = config.n_values[job / reps];
        const int replicate = static_cast<int>(job % reps);
        const Replicate rep =
            generate_replicate(n, config.forecasters, replicate_seed(config.seed, n, replicate));
        for (std::size_t f = 0; f < per_replicate; ++f) {
          table.records[job * per_replicate + f] = assess_cell(
              n, replicate, config.forecasters[f], PredictionSet(rep.predictions[f], rep.y));
        }
      },
      workers == 0 ? worker_count() : workers);
  return table;
}

}  // namespace boldcal
