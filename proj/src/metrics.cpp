#include "gtransnet/metrics.hpp"

#include "gtransnet/errors.hpp"

namespace gtransnet {

ErrorMetric relative_l2(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& exact) {
  if (predicted.rows() != exact.rows() || predicted.cols() != exact.cols()) {
    throw InvalidArgument("predicted and exact values have different shapes");
  }
  const double diff = (predicted - exact).norm();
  const double ref = exact.norm();
  if (ref == 0.0) {
    log_warning("exact solution has zero norm; reporting the absolute L2 error");
    return {diff, true};
  }
  return {diff / ref, false};
}

}  // namespace gtransnet
