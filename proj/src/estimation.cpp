#include "boldcal/estimation.hpp"

#include <array>
#include <cmath>
#include <optional>

#include "boldcal/nelder_mead.hpp"

namespace boldcal {

namespace {

struct SearchOutcome {
  Eigen::Vector2d point;
  double loglik;
  int iterations;
  NelderMeadStatus status;
};

MLEFit make_fit(const Eigen::ArrayXd& logit_x, const Eigen::ArrayXd& y, double log_delta,
                double gamma, double loglik, int iterations, double loglik_null) {
  MLEFit fit;
  fit.params = LLOParams<double>::from_log_odds(log_delta, gamma);
  fit.log_delta = log_delta;
  fit.loglik_at_mle = loglik;
  fit.loglik_at_null = loglik_null;
  fit.iterations = iterations;
  fit.gradient_norm =
      log_likelihood_gradient(logit_x, y, log_delta, gamma).norm() / double(logit_x.size());
  return fit;
}

}  // namespace

Eigen::Vector2d log_likelihood_gradient(const Eigen::ArrayXd& logit_x, const Eigen::ArrayXd& y,
                                        double log_delta, double gamma) {
  const Eigen::ArrayXd residual =
      y - (gamma * logit_x + log_delta).unaryExpr([](double e) { return sigmoid(e); });
  return {residual.sum(), (residual * logit_x).sum()};
}

MLEFit fit_mle(const PredictionSet& data, const MLEOptions& opts) {
  return fit_mle_log_odds(clamped_logit(data.x()), data.y(), opts);
}

MLEFit fit_mle_log_odds(const Eigen::ArrayXd& logit_x, const Eigen::ArrayXd& y,
                        const MLEOptions& opts) {
  const double n = double(y.size());
  const double events = y.sum();
  if (events == 0.0 || events == n) {
    throw DivergenceError("all outcomes belong to one class; the LLO likelihood has no maximizer");
  }
  const double loglik_null = log_likelihood_log_odds(logit_x, y, 0.0, 1.0);

  // Constant predictions leave gamma unidentified; only the intercept matters.
  // Fix gamma = 1 and solve for the shift in closed form.
  if (logit_x.maxCoeff() == logit_x.minCoeff()) {
    const double base_rate = events / n;
    const double log_delta = logit(base_rate) - logit_x(0);
    MLEFit fit = make_fit(logit_x, y, log_delta, 1.0,
                          log_likelihood_log_odds(logit_x, y, log_delta, 1.0), 0, loglik_null);
    fit.converged = true;
    return fit;
  }

  auto negative_loglik = [&](const Eigen::Vector2d& v) {
    return -log_likelihood_log_odds(logit_x, y, v(0), v(1));
  };
  auto in_bounds = [&](const Eigen::Vector2d& v) {
    return std::abs(v(0)) <= opts.divergence_bound && std::abs(v(1)) <= opts.divergence_bound;
  };

  // Run the simplex search, restarting from the incumbent with a smaller
  // simplex until a restart no longer improves the objective.
  auto search = [&](const Eigen::Vector2d& start) {
    NelderMeadOptions nm{opts.loglik_tolerance, opts.max_iterations, 0.25};
    auto result = nelder_mead<2>(negative_loglik, start, nm, in_bounds);
    int used = result.iterations;
    while (result.status == NelderMeadStatus::Converged && used < opts.max_iterations) {
      nm.initial_step = std::max(nm.initial_step * 0.1, 1e-6);
      nm.max_iterations = opts.max_iterations - used;
      const auto again = nelder_mead<2>(negative_loglik, result.point, nm, in_bounds);
      used += again.iterations;
      const double improvement = result.value - again.value;
      if (again.value <= result.value) {
        result.point = again.point;
        result.value = again.value;
      }
      if (again.status != NelderMeadStatus::Converged) {
        result.status = again.status;
        break;
      }
      if (improvement < opts.loglik_tolerance) break;
    }
    if (result.status == NelderMeadStatus::Converged && used >= opts.max_iterations) {
      result.status = NelderMeadStatus::MaxIterations;
    }
    return SearchOutcome{result.point, -result.value, used, result.status};
  };

  const std::array<Eigen::Vector2d, 4> starts = {
      Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.0, 0.25), Eigen::Vector2d(0.0, 2.0),
      Eigen::Vector2d(std::log(2.0), 1.0)};

  std::optional<MLEFit> best;
  bool any_in_bounds = false;
  for (const auto& start : starts) {
    const SearchOutcome out = search(start);
    if (out.status != NelderMeadStatus::OutOfBounds) any_in_bounds = true;
    MLEFit fit = make_fit(logit_x, y, out.point(0), out.point(1), out.loglik, out.iterations,
                          loglik_null);
    fit.converged = out.status == NelderMeadStatus::Converged &&
                    fit.gradient_norm <= opts.gradient_tolerance;
    if (fit.converged) return fit;
    if (out.status != NelderMeadStatus::OutOfBounds &&
        (!best || fit.loglik_at_mle > best->loglik_at_mle)) {
      best = fit;
    }
  }
  if (!any_in_bounds) {
    throw DivergenceError(
        "LLO parameters diverge (|log delta| or |gamma| > " +
        std::to_string(opts.divergence_bound) + "); outcomes are perfectly separated");
  }
  throw NonConvergenceError("maximum-likelihood search did not converge within " +
                                std::to_string(opts.max_iterations) + " iterations",
                            *best);
}

}  // namespace boldcal
