#include "staticgeo/detail/least_squares.hpp"

namespace staticgeo::detail {

std::optional<Eigen::VectorXd> least_squares(const Eigen::MatrixXd& design,
                                             const Eigen::VectorXd& target) {
  const Eigen::Index cols = design.cols();
  if (design.rows() < cols) return std::nullopt;

  Eigen::VectorXd scale(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    scale(j) = design.col(j).cwiseAbs().maxCoeff();
    if (!(scale(j) > 0.0)) return std::nullopt;
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) return std::nullopt;

  Eigen::VectorXd x = qr.solve(target);
  return x.cwiseQuotient(scale).eval();
}

}  // namespace staticgeo::detail
