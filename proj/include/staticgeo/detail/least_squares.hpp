#pragma once

#include <Eigen/Dense>

#include <optional>

namespace staticgeo::detail {

/// Column-scaled, column-pivoted QR least squares. Returns nullopt when the
/// design matrix is numerically rank deficient.
std::optional<Eigen::VectorXd> least_squares(const Eigen::MatrixXd& design,
                                             const Eigen::VectorXd& target);

}  // namespace staticgeo::detail
