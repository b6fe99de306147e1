#pragma once

// Linear-log-odds (LLO) recalibration kernel.
//
//   c(x; delta, gamma) = delta x^gamma / (delta x^gamma + (1-x)^gamma)
//
// which on the log-odds scale is the line  logit(c) = gamma logit(x) + log(delta).
// Everything here is evaluated through that line so it stays finite for any
// x in [eps, 1-eps].

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "boldcal/errors.hpp"
#include "boldcal/prediction_set.hpp"

namespace boldcal {

/// Predictions are clamped to [kProbabilityEpsilon, 1 - kProbabilityEpsilon]
/// before any log-odds transform.
inline constexpr double kProbabilityEpsilon = 1e-9;

/// Shift (delta, on the odds scale) and scale (gamma, on the log-odds scale).
/// (1, 1) is the identity map.
template <typename Scalar = double>
struct LLOParams {
  Scalar delta{1};
  Scalar gamma{1};

  static LLOParams identity() { return {Scalar(1), Scalar(1)}; }

  /// Parameters from the intercept/slope of the log-odds line.
  static LLOParams from_log_odds(Scalar log_delta, Scalar gamma) {
    using std::exp;
    return {exp(log_delta), gamma};
  }

  bool is_identity() const { return delta == Scalar(1) && gamma == Scalar(1); }

  friend bool operator==(const LLOParams&, const LLOParams&) = default;
};

template <typename Scalar>
void check_params(const LLOParams<Scalar>& p) {
  if (!(p.delta > Scalar(0)) || !std::isfinite(static_cast<double>(p.delta))) {
    throw DomainError("LLO shift delta must be a finite positive number, got " +
                      std::to_string(static_cast<double>(p.delta)));
  }
  if (!std::isfinite(static_cast<double>(p.gamma))) {
    throw DomainError("LLO scale gamma must be finite");
  }
}

template <typename Scalar>
Scalar clamp_probability(Scalar p) {
  const Scalar lo(kProbabilityEpsilon);
  const Scalar hi = Scalar(1) - lo;
  return p < lo ? lo : (p > hi ? hi : p);
}

template <typename Scalar>
Scalar logit(Scalar p) {
  using std::log;
  using std::log1p;
  return log(p) - log1p(-p);
}

/// Numerically stable logistic function.
template <typename Scalar>
Scalar sigmoid(Scalar eta) {
  using std::exp;
  if (eta >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-eta));
  const Scalar e = exp(eta);
  return e / (Scalar(1) + e);
}

/// log(1 + exp(eta)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar eta) {
  using std::abs;
  using std::exp;
  using std::log1p;
  return (eta > Scalar(0) ? eta : Scalar(0)) + log1p(exp(-abs(eta)));
}

/// Elementwise clamp into [eps, 1-eps] followed by logit.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> clamped_logit(
    const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return logit(clamp_probability(v)); });
}

/// LLO-adjust a vector of probabilities. The identity parameters return the
/// clamped input unchanged.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> llo_adjust(
    const Eigen::ArrayBase<Derived>& x, const LLOParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  check_params(params);
  if (params.is_identity()) {
    return x.unaryExpr([](Scalar v) { return clamp_probability(v); });
  }
  using std::log;
  const Scalar log_delta = log(params.delta);
  const Scalar gamma = params.gamma;
  return x.unaryExpr([=](Scalar v) {
    return sigmoid(gamma * logit(clamp_probability(v)) + log_delta);
  });
}

/// Single-value convenience overload.
template <typename Scalar>
Scalar llo_adjust(Scalar x, const LLOParams<Scalar>& params) {
  Eigen::Array<Scalar, 1, 1> v;
  v(0) = x;
  return llo_adjust(v, params)(0);
}

/// Parameters of the inverse map: (delta^(-1/gamma), 1/gamma).
template <typename Scalar>
LLOParams<Scalar> llo_inverse(const LLOParams<Scalar>& params) {
  check_params(params);
  if (params.gamma == Scalar(0)) {
    throw NonInvertibleError("LLO map with gamma == 0 collapses every prediction and has no inverse");
  }
  using std::pow;
  return {pow(params.delta, Scalar(-1) / params.gamma), Scalar(1) / params.gamma};
}

/// Bernoulli log-likelihood written on the log-odds line.
/// `logit_x` must already be clamped; y holds 0/1 values.
template <typename DerivedL, typename DerivedY>
typename DerivedL::Scalar log_likelihood_log_odds(const Eigen::ArrayBase<DerivedL>& logit_x,
                                                  const Eigen::ArrayBase<DerivedY>& y,
                                                  typename DerivedL::Scalar log_delta,
                                                  typename DerivedL::Scalar gamma) {
  using Scalar = typename DerivedL::Scalar;
  // y log c + (1-y) log(1-c) == -softplus((1-2y) eta); keeping the sign inside
  // avoids cancellation for confident correct predictions.
  const auto signed_eta =
      ((Scalar(1) - Scalar(2) * y.template cast<Scalar>()) * (gamma * logit_x + log_delta)).eval();
  return -(signed_eta.max(Scalar(0)) + (-signed_eta.abs()).exp().log1p()).sum();
}

/// Log-likelihood of the outcomes under LLO-adjusted predictions.
inline double log_likelihood(const PredictionSet& data, const LLOParams<double>& params) {
  check_params(params);
  return log_likelihood_log_odds(clamped_logit(data.x()), data.y(), std::log(params.delta),
                                 params.gamma);
}

}  // namespace boldcal
