#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "boldcal/llo.hpp"

namespace boldcal {

enum class ForecasterKind { WellCalibrated, Hedger, Boaster, Biased, Custom };

/// A simulated forecaster: calibrated probabilities, perturbed by log-odds
/// noise of scale noise_sigma, then LLO-adjusted by (delta, gamma).
struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::WellCalibrated;
  double delta = 1.0;
  double gamma = 1.0;
  double noise_sigma = 0.0;

  /// The archetype's (delta, gamma): WellCalibrated (1, 1), Hedger (1, 0.25),
  /// Boaster (1, 2), Biased (2, 1).
  static ForecasterSpec archetype(ForecasterKind kind, double noise_sigma = 0.0);
  static ForecasterSpec custom(double delta, double gamma, double noise_sigma = 0.0);

  LLOParams<double> params() const { return {delta, gamma}; }
  /// Stable identifier used in study output, e.g. "hedger".
  std::string name() const;
};

std::string_view to_string(ForecasterKind kind);
/// Accepts the names produced by to_string; throws DomainError otherwise.
ForecasterKind parse_forecaster_kind(std::string_view name);

/// Noise levels of the default study design.
inline const std::vector<double> kDefaultNoiseLevels = {0.0, 0.1, 0.5, 1.0, 2.0};

struct Replicate {
  Eigen::ArrayXd p;  ///< true event probabilities, Uniform(0, 1)
  Eigen::ArrayXd y;  ///< Bernoulli(p) outcomes
  std::vector<Eigen::ArrayXd> predictions;  ///< one per requested spec
};

/// One Monte Carlo replicate. All specs share (p, y); specs with equal
/// noise_sigma share the same noise draws, so their predictions are monotone
/// transforms of one noisy base.
Replicate generate_replicate(int n, const std::vector<ForecasterSpec>& specs, std::uint64_t seed);

struct MCStudyConfig {
  std::vector<int> n_values = {30, 100, 800, 2000, 5000};
  int replicates = 100;
  std::uint64_t seed = 20230101;
  std::vector<ForecasterSpec> forecasters;

  /// Every archetype crossed with every noise level, in archetype-major order.
  static std::vector<ForecasterSpec> default_forecasters();
  void validate() const;
};

/// Per-cell outcome of the study. Metrics that cannot be computed (diverged
/// fits, single-class AUC) are NaN; a diverged fit records posterior 0.
struct StudyRecord {
  int n = 0;
  int replicate = 0;
  ForecasterSpec forecaster;
  double posterior = 0.0;
  double lrt_p_value = 0.0;
  double brier = 0.0;
  double brier_calibration = 0.0;
  double ece = 0.0;
  double auc = 0.0;
  bool diverged = false;
};

/// Ordered by n (config order), then replicate, then forecaster (config order).
struct StudyTable {
  std::vector<StudyRecord> records;
};

/// Seed of replicate `replicate` at size n, derived from the study seed.
std::uint64_t replicate_seed(std::uint64_t study_seed, int n, int replicate);

StudyTable run_mc_study(const MCStudyConfig& config, unsigned workers = 0);

}  // namespace boldcal
