#include "gtransnet/derivprop.hpp"

#include <cmath>

#include "gtransnet/errors.hpp"

namespace gtransnet {
namespace {

Eigen::MatrixXd elementwise_tanh(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return std::tanh(v); });
}

// Flags an intermediate layer must carry so the next layer can honour `out`.
EvalFlags upstream_flags(EvalFlags out) {
  EvalFlags need = EvalFlags::Values;
  if (has(out, EvalFlags::Jacobian) || has(out, EvalFlags::Laplacian)) need = need | EvalFlags::Jacobian;
  if (has(out, EvalFlags::Laplacian)) need = need | EvalFlags::Laplacian;
  return need;
}

void check_points(const FeatureNetwork& net, const PointMatrix& points) {
  if (points.cols() != net.dim()) {
    throw InvalidArgument("points have " + std::to_string(points.cols()) +
                          " columns, network expects " + std::to_string(net.dim()));
  }
}

}  // namespace

Eigen::Index EvalBundle::points() const {
  if (values.size()) return values.rows();
  if (!jacobian.empty()) return jacobian.front().rows();
  return laplacian.rows();
}

Eigen::Index EvalBundle::neurons() const {
  if (values.size()) return values.cols();
  if (!jacobian.empty()) return jacobian.front().cols();
  return laplacian.cols();
}

EvalBundle eval_layer1(const FeatureNetwork& net, const PointMatrix& points, EvalFlags flags) {
  check_points(net, points);
  const int d = net.dim();
  const Eigen::MatrixXd& a = net.directions();
  const Eigen::VectorXd& gamma = net.shapes();

  Eigen::MatrixXd centered = points.rowwise() - net.ball().center.transpose();
  Eigen::MatrixXd z(points.rows(), net.first_width());
  z.noalias() = centered * a.transpose();
  const Eigen::RowVectorXd shift = (net.ball().radius * net.offsets()).transpose();
  z.rowwise() += shift;
  z = z * gamma.asDiagonal();

  EvalBundle out;
  out.flags = flags | EvalFlags::Values;
  out.values = elementwise_tanh(z);
  if (!has(flags, EvalFlags::Jacobian) && !has(flags, EvalFlags::Laplacian)) return out;

  const Eigen::ArrayXXd t = out.values.array();
  const Eigen::ArrayXXd slope = 1.0 - t.square();
  if (has(flags, EvalFlags::Jacobian)) {
    out.jacobian.resize(d);
    for (int p = 0; p < d; ++p) {
      const Eigen::RowVectorXd scale = gamma.cwiseProduct(a.col(p)).transpose();
      out.jacobian[p] = (slope.rowwise() * scale.array()).matrix();
    }
  }
  if (has(flags, EvalFlags::Laplacian)) {
    // lap tanh(gamma a.x + c) = tanh''(z) gamma^2 |a|^2 with tanh'' = -2 t (1 - t^2)
    const Eigen::RowVectorXd curvature =
        (gamma.array().square() * a.rowwise().squaredNorm().array()).matrix().transpose();
    out.laplacian = ((-2.0 * t * slope).rowwise() * curvature.array()).matrix();
  }
  return out;
}

EvalBundle propagate_layer(const EvalBundle& prev, const Eigen::MatrixXd& weights,
                           EvalFlags flags) {
  if (prev.values.size() == 0 || !has(prev.flags, EvalFlags::Values)) {
    throw InvalidArgument("propagate_layer needs the previous layer's values");
  }
  if (weights.cols() != prev.values.cols()) {
    throw InvalidArgument("weight matrix has " + std::to_string(weights.cols()) +
                          " columns but the previous layer has " +
                          std::to_string(prev.values.cols()) + " neurons");
  }
  const bool want_jac = has(flags, EvalFlags::Jacobian);
  const bool want_lap = has(flags, EvalFlags::Laplacian);
  if ((want_jac || want_lap) && !has(prev.flags, EvalFlags::Jacobian)) {
    throw InvalidArgument("propagate_layer needs the previous Jacobian for derivatives");
  }
  if (want_lap && !has(prev.flags, EvalFlags::Laplacian)) {
    throw InvalidArgument("propagate_layer needs the previous Laplacian");
  }

  const Eigen::Index k = prev.values.rows();
  const Eigen::Index n = weights.rows();
  EvalBundle out;
  out.flags = flags | EvalFlags::Values;

  Eigen::MatrixXd phi(k, n);
  phi.noalias() = prev.values * weights.transpose();
  out.values = elementwise_tanh(phi);
  if (!want_jac && !want_lap) return out;

  const Eigen::ArrayXXd t = out.values.array();
  const Eigen::ArrayXXd slope = 1.0 - t.square();
  const int d = prev.dim();
  std::vector<Eigen::MatrixXd> grad_phi(d, Eigen::MatrixXd(k, n));
  for (int p = 0; p < d; ++p) grad_phi[p].noalias() = prev.jacobian[p] * weights.transpose();

  if (want_lap) {
    Eigen::MatrixXd lap_phi(k, n);
    lap_phi.noalias() = prev.laplacian * weights.transpose();
    Eigen::ArrayXXd grad_sq = Eigen::ArrayXXd::Zero(k, n);
    for (int p = 0; p < d; ++p) grad_sq += grad_phi[p].array().square();
    out.laplacian = (-2.0 * t * slope * grad_sq + slope * lap_phi.array()).matrix();
  }
  if (want_jac) {
    out.jacobian.resize(d);
    for (int p = 0; p < d; ++p) out.jacobian[p] = (slope * grad_phi[p].array()).matrix();
  } else {
    out.flags = EvalFlags::Values | EvalFlags::Laplacian;
  }
  return out;
}

void evaluate_blocks(const FeatureNetwork& net, const PointMatrix& points, EvalFlags flags,
                     Eigen::Index block_size,
                     const std::function<void(Eigen::Index, const EvalBundle&)>& visit) {
  check_points(net, points);
  if (block_size < 1) throw InvalidArgument("block size must be positive");
  const EvalFlags inner = upstream_flags(flags);
  const int depth = net.depth();
  for (Eigen::Index start = 0; start < points.rows(); start += block_size) {
    const Eigen::Index rows = std::min(block_size, points.rows() - start);
    const PointMatrix block = points.middleRows(start, rows);
    EvalBundle bundle = eval_layer1(net, block, depth == 1 ? flags : inner);
    for (int l = 1; l < depth; ++l) {
      bundle = propagate_layer(bundle, net.deep_weights()[l - 1], l + 1 == depth ? flags : inner);
    }
    visit(start, bundle);
  }
}

EvalBundle evaluate(const FeatureNetwork& net, const PointMatrix& points, EvalFlags flags,
                    Eigen::Index block_size) {
  check_points(net, points);
  const Eigen::Index k = points.rows();
  const Eigen::Index n = net.last_width();
  const bool want_jac = has(flags, EvalFlags::Jacobian);
  const bool want_lap = has(flags, EvalFlags::Laplacian);
  EvalBundle out;
  out.flags = EvalFlags::Values;
  out.values.resize(k, n);
  if (want_jac) {
    out.flags = out.flags | EvalFlags::Jacobian;
    out.jacobian.assign(net.dim(), Eigen::MatrixXd(k, n));
  }
  if (want_lap) {
    out.flags = out.flags | EvalFlags::Laplacian;
    out.laplacian.resize(k, n);
  }
  evaluate_blocks(net, points, flags, block_size, [&](Eigen::Index start, const EvalBundle& b) {
    const Eigen::Index rows = b.points();
    out.values.middleRows(start, rows) = b.values;
    if (want_jac) {
      for (int p = 0; p < net.dim(); ++p) out.jacobian[p].middleRows(start, rows) = b.jacobian[p];
    }
    if (want_lap) out.laplacian.middleRows(start, rows) = b.laplacian;
  });
  return out;
}

std::vector<Eigen::MatrixXd> evaluate_layers(const FeatureNetwork& net, const PointMatrix& points) {
  std::vector<Eigen::MatrixXd> layers;
  EvalBundle bundle = eval_layer1(net, points, EvalFlags::Values);
  layers.push_back(bundle.values);
  for (const auto& w : net.deep_weights()) {
    bundle = propagate_layer(bundle, w, EvalFlags::Values);
    layers.push_back(bundle.values);
  }
  return layers;
}

Eigen::VectorXd predict(const FeatureNetwork& net, const PointMatrix& points, int field,
                        Eigen::Index block_size) {
  const Eigen::MatrixXd& alpha = net.output_weights();
  if (field < 0 || field >= alpha.cols()) throw InvalidArgument("no such output field");
  Eigen::VectorXd u(points.rows());
  evaluate_blocks(net, points, EvalFlags::Values, block_size,
                  [&](Eigen::Index start, const EvalBundle& b) {
                    u.segment(start, b.points()).noalias() = b.values * alpha.col(field);
                  });
  return u;
}

}  // namespace gtransnet
