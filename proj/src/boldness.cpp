#include "boldcal/boldness.hpp"

#include <algorithm>
#include <cmath>

#include "boldcal/assessment.hpp"
#include "boldcal/parallel.hpp"

namespace boldcal {

double spread(const Eigen::ArrayXd& x) {
  if (x.size() < 2 || x.maxCoeff() == x.minCoeff()) return 0.0;
  const double mean = x.mean();
  return std::sqrt((x - mean).square().sum() / double(x.size() - 1));
}

GridSpec GridSpec::make(double delta_min, double delta_max, double gamma_min, double gamma_max,
                        int k) {
  if (k < 1) throw DomainError("grid needs at least one value per axis");
  if (!(delta_min > 0.0) || !(delta_max >= delta_min) || !(gamma_max >= gamma_min)) {
    throw DomainError("grid ranges must be increasing with positive delta");
  }
  GridSpec spec;
  spec.delta_values.resize(static_cast<std::size_t>(k));
  spec.gamma_values.resize(static_cast<std::size_t>(k));
  const double lo = std::log(delta_min), hi = std::log(delta_max);
  for (int i = 0; i < k; ++i) {
    const double frac = k == 1 ? 0.0 : double(i) / double(k - 1);
    spec.delta_values[i] = std::exp(lo + frac * (hi - lo));
    spec.gamma_values[i] = gamma_min + frac * (gamma_max - gamma_min);
  }
  spec.delta_values.front() = delta_min;
  spec.gamma_values.front() = gamma_min;
  if (k > 1) {
    spec.delta_values.back() = delta_max;
    spec.gamma_values.back() = gamma_max;
  }
  spec.validate();
  return spec;
}

void GridSpec::validate() const {
  if (delta_values.empty() || gamma_values.empty()) throw DomainError("grid axes must be non-empty");
  for (std::size_t i = 0; i < delta_values.size(); ++i) {
    if (!(delta_values[i] > 0.0) || !std::isfinite(delta_values[i])) {
      throw DomainError("grid delta values must be finite and positive");
    }
    if (i > 0 && !(delta_values[i] > delta_values[i - 1])) {
      throw DomainError("grid delta values must be strictly increasing");
    }
  }
  for (std::size_t j = 0; j < gamma_values.size(); ++j) {
    if (!std::isfinite(gamma_values[j])) throw DomainError("grid gamma values must be finite");
    if (j > 0 && !(gamma_values[j] > gamma_values[j - 1])) {
      throw DomainError("grid gamma values must be strictly increasing");
    }
  }
}

namespace {

struct CellValue {
  double posterior;
  CellStatus status;
};

CellValue fit_cell(const Eigen::ArrayXd& logit_adjusted, const Eigen::ArrayXd& y,
                   double prior) {
  const auto n = static_cast<std::size_t>(y.size());
  try {
    const MLEFit fit = fit_mle_log_odds(logit_adjusted, y);
    return {bayes_assessment(n, fit.loglik_at_null, fit.loglik_at_mle, prior).posterior_calibrated,
            CellStatus::Ok};
  } catch (const DivergenceError&) {
    return {0.0, CellStatus::Diverged};
  } catch (const NonConvergenceError& e) {
    const MLEFit& best = e.best();
    return {bayes_assessment(n, best.loglik_at_null, best.loglik_at_mle, prior).posterior_calibrated,
            CellStatus::Unconverged};
  }
}

bool hits_clamp(const Eigen::ArrayXd& x) {
  return (x < kProbabilityEpsilon).any() || (x > 1.0 - kProbabilityEpsilon).any();
}

}  // namespace

ContourGrid evaluate_grid(const PredictionSet& data, const GridSpec& spec,
                          const GridOptions& options) {
  spec.validate();
  const auto rows = static_cast<Eigen::Index>(spec.delta_values.size());
  const auto cols = static_cast<Eigen::Index>(spec.gamma_values.size());

  ContourGrid grid;
  grid.delta_values = spec.delta_values;
  grid.gamma_values = spec.gamma_values;
  grid.posterior.resize(rows, cols);
  grid.spread.resize(rows, cols);
  grid.status.assign(static_cast<std::size_t>(rows * cols), CellStatus::Ok);

  const Eigen::ArrayXd& y = data.y();
  const auto n = data.size();
  const double prior = options.prior_calibrated;

  // maximized likelihood of the original set, shared by reparameterized cells
  std::optional<MLEFit> reference_fit;
  CellStatus reference_status = CellStatus::Ok;
  if (options.likelihood == CellLikelihood::Reparameterized) {
    try {
      reference_fit = fit_mle(data);
    } catch (const DivergenceError&) {
      reference_status = CellStatus::Diverged;
    } catch (const NonConvergenceError& e) {
      reference_fit = e.best();
      reference_status = CellStatus::Unconverged;
    }
  }

  const unsigned workers = options.workers == 0 ? worker_count() : options.workers;
  parallel_for(
      static_cast<std::size_t>(rows * cols),
      [&](std::size_t flat) {
        const auto i = static_cast<Eigen::Index>(flat) / cols;
        const auto j = static_cast<Eigen::Index>(flat) % cols;
        const LLOParams<double> cell{spec.delta_values[i], spec.gamma_values[j]};
        const Eigen::ArrayXd adjusted = llo_adjust(data.x(), cell);
        const Eigen::ArrayXd logit_adjusted = clamped_logit(adjusted);

        CellValue value;
        const bool reuse = options.likelihood == CellLikelihood::Reparameterized &&
                           cell.gamma != 0.0 && !hits_clamp(adjusted);
        if (!reuse) {
          value = fit_cell(logit_adjusted, y, prior);
        } else if (reference_status == CellStatus::Diverged) {
          value = {0.0, CellStatus::Diverged};
        } else {
          const double loglik_null = log_likelihood_log_odds(logit_adjusted, y, 0.0, 1.0);
          // the shared maximum can never be below this cell's null likelihood
          const double loglik_mle = std::max(reference_fit->loglik_at_mle, loglik_null);
          value.posterior = bayes_assessment(n, loglik_null, loglik_mle, prior).posterior_calibrated;
          value.status = reference_status;
        }
        grid.posterior(i, j) = value.posterior;
        grid.status[flat] = value.status;
        grid.spread(i, j) = spread(adjusted);
      },
      workers);
  return grid;
}

GridSpec refine_grid(const PredictionSet& data, const MLEFit& mle, const RefineOptions& options) {
  if (options.k < 1 || options.coarse_k < 3) throw DomainError("refine_grid: grid sizes too small");
  const double center_log_delta = mle.log_delta;
  const double center_gamma = mle.params.gamma;
  double half_tau = options.initial_half_width_log_delta;
  double half_gamma = options.initial_half_width_gamma;
  // odd size keeps the MLE itself on the coarse grid
  const int coarse_k = options.coarse_k | 1;

  auto spec_for = [&](int k) {
    return GridSpec::make(std::exp(center_log_delta - half_tau), std::exp(center_log_delta + half_tau),
                          center_gamma - half_gamma, center_gamma + half_gamma, k);
  };

  bool covered = false;
  for (int doubling = 0; doubling <= options.max_doublings; ++doubling) {
    const ContourGrid coarse = evaluate_grid(data, spec_for(coarse_k), options.grid);
    const auto last = coarse.rows() - 1;
    const double delta_edges =
        std::max(coarse.posterior.row(0).maxCoeff(), coarse.posterior.row(last).maxCoeff());
    const double gamma_edges =
        std::max(coarse.posterior.col(0).maxCoeff(), coarse.posterior.col(last).maxCoeff());
    const bool widen_delta = delta_edges >= options.boundary_posterior;
    const bool widen_gamma = gamma_edges >= options.boundary_posterior;
    if (!widen_delta && !widen_gamma) {
      covered = true;
      break;
    }
    if (doubling == options.max_doublings) break;
    if (widen_delta) half_tau *= 2.0;
    if (widen_gamma) half_gamma *= 2.0;
  }

  GridSpec spec = spec_for(options.k);
  if (!covered) {
    spec.warning = "grid expansion stopped after " + std::to_string(options.max_doublings) +
                   " doublings before the boundary posterior fell below " +
                   std::to_string(options.boundary_posterior);
  }
  return spec;
}

BoldnessResult boldness_recalibrate(const PredictionSet& data, double t, const ContourGrid& grid) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("calibration floor t must lie in (0, 1)");
  if (grid.rows() == 0 || grid.cols() == 0) throw DomainError("empty contour grid");

  Eigen::Index best_i = -1, best_j = -1;
  auto better_feasible = [&](Eigen::Index i, Eigen::Index j) {
    if (best_i < 0) return true;
    const double s = grid.spread(i, j), bs = grid.spread(best_i, best_j);
    if (s != bs) return s > bs;
    const double p = grid.posterior(i, j), bp = grid.posterior(best_i, best_j);
    if (p != bp) return p > bp;
    return std::abs(grid.gamma_values[j] - 1.0) < std::abs(grid.gamma_values[best_j] - 1.0);
  };
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      if (grid.posterior(i, j) >= t && better_feasible(i, j)) {
        best_i = i;
        best_j = j;
      }
    }
  }

  BoldnessResult result;
  result.t = t;
  result.feasible = best_i >= 0;
  if (!result.feasible) {
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      for (Eigen::Index j = 0; j < grid.cols(); ++j) {
        if (best_i < 0 || grid.posterior(i, j) > grid.posterior(best_i, best_j) ||
            (grid.posterior(i, j) == grid.posterior(best_i, best_j) &&
             grid.spread(i, j) > grid.spread(best_i, best_j))) {
          best_i = i;
          best_j = j;
        }
      }
    }
  }
  result.delta_index = best_i;
  result.gamma_index = best_j;
  result.params = grid.params(best_i, best_j);
  result.recalibrated = llo_adjust(data.x(), result.params);
  result.achieved_posterior = grid.posterior(best_i, best_j);
  result.achieved_spread = grid.spread(best_i, best_j);
  return result;
}

BoldnessResult boldness_recalibrate(const PredictionSet& data, double t, const GridSpec& spec,
                                    const GridOptions& options) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("calibration floor t must lie in (0, 1)");
  return boldness_recalibrate(data, t, evaluate_grid(data, spec, options));
}

}  // namespace boldcal
