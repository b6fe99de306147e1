#pragma once

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "boldcal/assessment.hpp"
#include "boldcal/boldness.hpp"
#include "boldcal/estimation.hpp"

namespace boldcal {

/// Everything `assess` reports for one prediction set.
struct AssessmentReport {
  std::size_t n = 0;
  double base_rate = 0.0;
  int bins = 10;
  double prior = 0.5;
  /// Single-class outcomes or diverging MLE: posterior reported as 0,
  /// likelihood fields empty.
  bool degenerate = false;
  std::optional<MLEFit> mle;
  std::optional<BayesAssessment> bayes;
  std::optional<LRTResult> lrt;
  ScoreReport scores;
  std::vector<std::string> warnings;

  double posterior() const { return bayes ? bayes->posterior_calibrated : 0.0; }
};

/// Runs the full assessment. Divergence is recorded, not thrown;
/// NonConvergenceError propagates.
AssessmentReport assess(const PredictionSet& data, int bins = 10, double prior = 0.5);

/// One row of the recalibration summary (original, MLE, or a t level).
struct RecalibrationRow {
  std::string name;  ///< "original", "mle", or "t=0.95"
  std::optional<double> t;
  LLOParams<double> params;
  double posterior = 0.0;
  double range_min = 0.0;
  double range_max = 0.0;
  double spread = 0.0;
  bool feasible = true;
};

struct RecalibrationReport {
  std::size_t n = 0;
  double base_rate = 0.0;
  double prior = 0.5;
  std::vector<RecalibrationRow> rows;
  /// Grid used for the t levels; empty when only the MLE was requested.
  std::optional<GridSpec> grid;
  std::vector<std::string> warnings;
};

RecalibrationRow make_row(std::string name, const LLOParams<double>& params,
                          const Eigen::ArrayXd& adjusted, double posterior);

nlohmann::json to_json(const AssessmentReport& report);
nlohmann::json to_json(const RecalibrationReport& report);

/// Human-readable aligned table of the assessment.
void print_table(std::ostream& out, const AssessmentReport& report);
void print_table(std::ostream& out, const RecalibrationReport& report);

}  // namespace boldcal
