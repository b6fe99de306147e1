#include "boldcal/prediction_set.hpp"

#include <cmath>
#include <string>

#include "boldcal/errors.hpp"

namespace boldcal {

PredictionSet::PredictionSet(Eigen::ArrayXd x, Eigen::ArrayXd y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() == 0) throw DomainError("prediction set must contain at least one observation");
  if (x_.size() != y_.size()) {
    throw DomainError("prediction and outcome vectors differ in length (" +
                      std::to_string(x_.size()) + " vs " + std::to_string(y_.size()) + ")");
  }
  for (Eigen::Index i = 0; i < x_.size(); ++i) {
    if (!(x_(i) >= 0.0 && x_(i) <= 1.0)) {
      throw DomainError("prediction " + std::to_string(i) + " is outside [0, 1]");
    }
    if (y_(i) != 0.0 && y_(i) != 1.0) {
      throw DomainError("outcome " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

PredictionSet::PredictionSet(std::span<const double> x, std::span<const int> y)
    : PredictionSet(Eigen::Map<const Eigen::ArrayXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                    Eigen::Map<const Eigen::ArrayXi>(y.data(), static_cast<Eigen::Index>(y.size()))
                        .cast<double>()) {}

}  // namespace boldcal
