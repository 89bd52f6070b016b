#pragma once

#include <Eigen/Dense>

namespace gtransnet {

struct ErrorMetric {
  double value = 0;
  /// True when the exact norm vanished and `value` is the absolute L2 norm.
  bool absolute = false;
};

/// sqrt(sum (u - u_nn)^2) / sqrt(sum u^2) over the given samples. Columns are
/// pooled, so a multi-field error is the combined relative L2 norm.
ErrorMetric relative_l2(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& exact);

}  // namespace gtransnet
