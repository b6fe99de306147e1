#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <utility>

namespace boldcal {

/// Paired probability predictions and binary outcomes.
///
/// Invariants (checked on construction): equal non-zero lengths, every
/// prediction in [0, 1], every outcome exactly 0 or 1.
class PredictionSet {
 public:
  PredictionSet(Eigen::ArrayXd x, Eigen::ArrayXd y);
  PredictionSet(std::span<const double> x, std::span<const int> y);

  const Eigen::ArrayXd& x() const noexcept { return x_; }
  const Eigen::ArrayXd& y() const noexcept { return y_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.size()); }

  double base_rate() const { return y_.mean(); }
  std::size_t events() const { return static_cast<std::size_t>(y_.sum()); }
  bool single_class() const {
    const auto e = events();
    return e == 0 || e == size();
  }

  /// Same outcomes, different predictions.
  PredictionSet with_predictions(Eigen::ArrayXd x) const {
    return PredictionSet(std::move(x), y_);
  }

 private:
  Eigen::ArrayXd x_;
  Eigen::ArrayXd y_;
};

}  // namespace boldcal
