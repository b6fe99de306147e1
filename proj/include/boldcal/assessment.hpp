#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "boldcal/estimation.hpp"
#include "boldcal/prediction_set.hpp"

namespace boldcal {

/// BIC-approximated comparison of the calibrated model (delta = gamma = 1)
/// against the free LLO model.
struct BayesAssessment {
  double bic_null = 0.0;  ///< -2 l(1, 1); no penalty, nothing is estimated
  double bic_mle = 0.0;   ///< 2 log n - 2 l(delta_hat, gamma_hat)
  double bayes_factor_21 = 0.0;
  /// log of bayes_factor_21, finite even when the factor itself overflows.
  double log_bayes_factor_21 = 0.0;
  double prior_calibrated = 0.5;
  double posterior_calibrated = 0.0;
};

/// Posterior probability of calibration from the two maximized
/// log-likelihoods. Exposed separately so callers that already hold a fit
/// (or a known likelihood pair) do not refit.
BayesAssessment bayes_assessment(std::size_t n, double loglik_null, double loglik_mle,
                                 double prior_calibrated = 0.5);

/// Fits the MLE and returns P(calibrated | y). Propagates DivergenceError and
/// NonConvergenceError from the fit.
BayesAssessment posterior_calibration(const PredictionSet& data, double prior_calibrated = 0.5);

/// Likelihood-ratio test of delta = gamma = 1 against the free model,
/// referred to chi-squared with two degrees of freedom.
struct LRTResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 2;
};

LRTResult lrt(const PredictionSet& data);
LRTResult lrt_from_fit(const MLEFit& fit);

/// Survival function of chi-squared(2): exp(-x / 2).
inline double chi_squared_2_survival(double x) { return x <= 0.0 ? 1.0 : std::exp(-0.5 * x); }

/// Mean squared difference between predictions and outcomes.
double brier(const PredictionSet& data);

/// Calibration addend of the binned Brier decomposition:
/// (1/n) sum_k n_k (xbar_k - ybar_k)^2 over equal-width bins.
double brier_calibration(const PredictionSet& data, int n_bins = 10);

/// Expected calibration error: sum_b (n_b / n) |ybar_b - xbar_b|.
double ece(const PredictionSet& data, int n_bins = 10);

/// Mann-Whitney concordance between events and non-events, ties count 1/2.
/// Throws UndefinedAucError on single-class data.
double auc(const PredictionSet& data);

/// Equal-width right-closed bins on [0, 1]: bin 0 is [0, 1/B], bin k is
/// (k/B, (k+1)/B].
std::vector<double> bin_edges(int n_bins);
int bin_index(double x, const std::vector<double>& edges);

struct ScoreReport {
  double brier = 0.0;
  double brier_calibration = 0.0;
  double ece = 0.0;
  std::optional<double> auc;  ///< empty for single-class data
  int n_bins = 10;
  std::vector<double> bin_edges;
};

ScoreReport score_report(const PredictionSet& data, int n_bins = 10);

}  // namespace boldcal
