#include "boldcal/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

namespace boldcal {

BayesAssessment bayes_assessment(std::size_t n, double loglik_null, double loglik_mle,
                                 double prior_calibrated) {
  if (!(prior_calibrated > 0.0 && prior_calibrated < 1.0)) {
    throw DomainError("prior probability of calibration must lie in (0, 1)");
  }
  if (n == 0) throw DomainError("assessment needs at least one observation");

  BayesAssessment out;
  out.prior_calibrated = prior_calibrated;
  out.bic_null = -2.0 * loglik_null;
  out.bic_mle = 2.0 * std::log(double(n)) - 2.0 * loglik_mle;
  out.log_bayes_factor_21 = -0.5 * (out.bic_mle - out.bic_null);
  out.bayes_factor_21 = std::exp(out.log_bayes_factor_21);
  // [1 + BF21 (1 - prior) / prior]^-1 evaluated on the log scale
  const double log_prior_odds_nc = std::log1p(-prior_calibrated) - std::log(prior_calibrated);
  out.posterior_calibrated = sigmoid(-(out.log_bayes_factor_21 + log_prior_odds_nc));
  return out;
}

BayesAssessment posterior_calibration(const PredictionSet& data, double prior_calibrated) {
  if (!(prior_calibrated > 0.0 && prior_calibrated < 1.0)) {
    throw DomainError("prior probability of calibration must lie in (0, 1)");
  }
  const MLEFit fit = fit_mle(data);
  return bayes_assessment(data.size(), fit.loglik_at_null, fit.loglik_at_mle, prior_calibrated);
}

LRTResult lrt_from_fit(const MLEFit& fit) {
  const double statistic = 2.0 * (fit.loglik_at_mle - fit.loglik_at_null);
  if (statistic < -1e-8) {
    throw ConsistencyError("negative likelihood-ratio statistic " + std::to_string(statistic) +
                           "; the maximum-likelihood search failed");
  }
  LRTResult out;
  out.statistic = std::max(statistic, 0.0);
  out.p_value = chi_squared_2_survival(out.statistic);
  return out;
}

LRTResult lrt(const PredictionSet& data) { return lrt_from_fit(fit_mle(data)); }

double brier(const PredictionSet& data) { return (data.x() - data.y()).square().mean(); }

std::vector<double> bin_edges(int n_bins) {
  if (n_bins < 1) throw DomainError("bin count must be at least 1");
  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  for (int k = 0; k <= n_bins; ++k) edges[k] = double(k) / double(n_bins);
  edges.back() = 1.0;
  return edges;
}

int bin_index(double x, const std::vector<double>& edges) {
  const int n_bins = static_cast<int>(edges.size()) - 1;
  int idx = std::clamp(static_cast<int>(std::ceil(x * n_bins)) - 1, 0, n_bins - 1);
  // settle against the stored edges so the right-closed rule is exact
  while (idx > 0 && x <= edges[idx]) --idx;
  while (idx < n_bins - 1 && x > edges[idx + 1]) ++idx;
  return idx;
}

namespace {

struct BinStats {
  Eigen::ArrayXd count, sum_x, sum_y;
};

BinStats accumulate_bins(const PredictionSet& data, int n_bins) {
  const auto edges = bin_edges(n_bins);
  BinStats s{Eigen::ArrayXd::Zero(n_bins), Eigen::ArrayXd::Zero(n_bins),
             Eigen::ArrayXd::Zero(n_bins)};
  for (Eigen::Index i = 0; i < data.x().size(); ++i) {
    const int b = bin_index(data.x()(i), edges);
    s.count(b) += 1.0;
    s.sum_x(b) += data.x()(i);
    s.sum_y(b) += data.y()(i);
  }
  return s;
}

}  // namespace

double brier_calibration(const PredictionSet& data, int n_bins) {
  const BinStats s = accumulate_bins(data, n_bins);
  double total = 0.0;
  for (Eigen::Index b = 0; b < s.count.size(); ++b) {
    if (s.count(b) == 0.0) continue;
    const double gap = (s.sum_x(b) - s.sum_y(b)) / s.count(b);
    total += s.count(b) * gap * gap;
  }
  return total / double(data.size());
}

double ece(const PredictionSet& data, int n_bins) {
  const BinStats s = accumulate_bins(data, n_bins);
  double total = 0.0;
  for (Eigen::Index b = 0; b < s.count.size(); ++b) {
    if (s.count(b) == 0.0) continue;
    total += std::abs(s.sum_y(b) - s.sum_x(b));  // n_b * |ybar_b - xbar_b|
  }
  return total / double(data.size());
}

double auc(const PredictionSet& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto events = static_cast<std::int64_t>(data.events());
  const std::int64_t non_events = n - events;
  if (events == 0 || non_events == 0) {
    throw UndefinedAucError("AUC is undefined when all outcomes belong to one class");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& x = data.x();
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x(a) < x(b); });

  // Sum of doubled mid-ranks of the events, kept integral so the result is
  // exact and depends only on the ordering of x.
  std::int64_t doubled_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x(order[j + 1]) == x(order[i])) ++j;
    const auto doubled_midrank = static_cast<std::int64_t>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (data.y()(order[k]) == 1.0) doubled_rank_sum += doubled_midrank;
    }
    i = j + 1;
  }
  const std::int64_t doubled_u = doubled_rank_sum - events * (events + 1);
  return double(doubled_u) / (2.0 * double(events) * double(non_events));
}

ScoreReport score_report(const PredictionSet& data, int n_bins) {
  ScoreReport r;
  r.n_bins = n_bins;
  r.bin_edges = bin_edges(n_bins);
  r.brier = brier(data);
  r.brier_calibration = brier_calibration(data, n_bins);
  r.ece = ece(data, n_bins);
  if (!data.single_class()) r.auc = auc(data);
  return r;
}

}  // namespace boldcal
