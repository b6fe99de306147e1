#pragma once

#include <Eigen/Dense>

#include "boldcal/errors.hpp"
#include "boldcal/llo.hpp"
#include "boldcal/prediction_set.hpp"

namespace boldcal {

/// Maximum-likelihood LLO fit.
struct MLEFit {
  LLOParams<double> params;
  /// log(params.delta), kept separately because the search runs on this scale.
  double log_delta = 0.0;
  double loglik_at_mle = 0.0;
  double loglik_at_null = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Norm of the log-likelihood gradient in (log delta, gamma), divided by n.
  double gradient_norm = 0.0;
};

/// Raised when no start reaches the convergence tolerance. Carries the best
/// fit found.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, MLEFit best) : Error(what), best_(best) {}
  const MLEFit& best() const noexcept { return best_; }

 private:
  MLEFit best_;
};

struct MLEOptions {
  double loglik_tolerance = 1e-10;
  int max_iterations = 500;
  /// |log delta| or |gamma| beyond this during the search means divergence.
  double divergence_bound = 30.0;
  /// Scaled gradient norm (see MLEFit::gradient_norm) required for `converged`.
  double gradient_tolerance = 1e-5;
};

/// Fits (delta, gamma) maximizing the Bernoulli LLO likelihood by simplex
/// search in (log delta, gamma), starting at the identity with fallback starts
/// at gamma = 0.25, gamma = 2 and delta = 2.
///
/// Throws DivergenceError when the outcomes are single-class or the search
/// leaves the divergence bound from every start, NonConvergenceError when no
/// start converges.
MLEFit fit_mle(const PredictionSet& data, const MLEOptions& opts = {});

/// Same search on precomputed clamped log-odds.
MLEFit fit_mle_log_odds(const Eigen::ArrayXd& logit_x, const Eigen::ArrayXd& y,
                        const MLEOptions& opts = {});

/// Gradient of the log-likelihood with respect to (log delta, gamma).
Eigen::Vector2d log_likelihood_gradient(const Eigen::ArrayXd& logit_x, const Eigen::ArrayXd& y,
                                        double log_delta, double gamma);

}  // namespace boldcal
