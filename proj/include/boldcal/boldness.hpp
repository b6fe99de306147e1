#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boldcal/estimation.hpp"
#include "boldcal/llo.hpp"
#include "boldcal/prediction_set.hpp"

namespace boldcal {

/// Sample standard deviation (divisor n - 1) of a prediction vector; exactly
/// 0 for constant vectors and for a single element.
double spread(const Eigen::ArrayXd& x);

/// Candidate parameter values: delta log-spaced, gamma linear.
struct GridSpec {
  std::vector<double> delta_values;
  std::vector<double> gamma_values;
  /// Set by refine_grid when expansion hit its cap before the
  /// high-posterior region was enclosed.
  std::optional<std::string> warning;

  /// k log-spaced deltas on [delta_min, delta_max] and k linear gammas on
  /// [gamma_min, gamma_max]. k == 1 uses the lower bounds.
  static GridSpec make(double delta_min, double delta_max, double gamma_min, double gamma_max,
                       int k);

  /// Throws DomainError unless both axes are non-empty and strictly
  /// increasing and every delta is positive.
  void validate() const;
};

enum class CellStatus : std::uint8_t {
  Ok,
  Diverged,     ///< MLE of the adjusted set has no maximizer; posterior recorded as 0
  Unconverged,  ///< best-so-far MLE used
};

/// Posterior probability of calibration and spread for every (delta_i, gamma_j).
struct ContourGrid {
  std::vector<double> delta_values;
  std::vector<double> gamma_values;
  Eigen::ArrayXXd posterior;  ///< rows index delta, columns index gamma
  Eigen::ArrayXXd spread;
  std::vector<CellStatus> status;  ///< row-major, delta-major

  Eigen::Index rows() const { return posterior.rows(); }
  Eigen::Index cols() const { return posterior.cols(); }
  CellStatus cell_status(Eigen::Index i, Eigen::Index j) const {
    return status[static_cast<std::size_t>(i * cols() + j)];
  }
  LLOParams<double> params(Eigen::Index i, Eigen::Index j) const {
    return {delta_values[static_cast<std::size_t>(i)], gamma_values[static_cast<std::size_t>(j)]};
  }
};

/// How each cell obtains the maximized likelihood of its adjusted set.
enum class CellLikelihood {
  /// Refit the MLE on every adjusted set.
  Refit,
  /// For gamma != 0 the adjusted set's log-odds are an affine image of the
  /// original log-odds, so its maximized likelihood equals the original one;
  /// the single original fit is reused. Cells with gamma == 0 or with
  /// adjusted predictions that hit the clamp are refit.
  Reparameterized,
};

struct GridOptions {
  CellLikelihood likelihood = CellLikelihood::Reparameterized;
  double prior_calibrated = 0.5;
  /// 0 means worker_count().
  unsigned workers = 0;
};

ContourGrid evaluate_grid(const PredictionSet& data, const GridSpec& spec,
                          const GridOptions& options = {});

struct RefineOptions {
  int k = 200;
  /// Per-axis size of the coarse grids used while searching for coverage.
  int coarse_k = 15;
  double initial_half_width_log_delta = 0.1;
  double initial_half_width_gamma = 0.1;
  int max_doublings = 10;
  /// Coverage is reached when every boundary cell is below this posterior.
  double boundary_posterior = 1e-4;
  GridOptions grid;
};

/// Grid centred on the MLE, widened until its boundary posterior falls
/// below `boundary_posterior`, then densified to k points per axis.
GridSpec refine_grid(const PredictionSet& data, const MLEFit& mle, const RefineOptions& options = {});

struct BoldnessResult {
  double t = 0.0;
  LLOParams<double> params;
  Eigen::ArrayXd recalibrated;
  double achieved_posterior = 0.0;
  double achieved_spread = 0.0;
  bool feasible = false;
  Eigen::Index delta_index = 0;
  Eigen::Index gamma_index = 0;
};

/// Picks the cell with maximal spread among those with posterior >= t.
/// Ties go to the higher posterior, then to the gamma closest to 1. When no
/// cell reaches t the maximum-posterior cell is returned with feasible = false.
BoldnessResult boldness_recalibrate(const PredictionSet& data, double t, const ContourGrid& grid);

BoldnessResult boldness_recalibrate(const PredictionSet& data, double t, const GridSpec& spec,
                                    const GridOptions& options = {});

}  // namespace boldcal
