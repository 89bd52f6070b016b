#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/featurenet.hpp"

namespace gtransnet {

enum class EvalFlags : unsigned {
  None = 0,
  Values = 1u << 0,
  Jacobian = 1u << 1,
  Laplacian = 1u << 2,
  All = Values | Jacobian | Laplacian,
};

constexpr EvalFlags operator|(EvalFlags a, EvalFlags b) {
  return static_cast<EvalFlags>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr EvalFlags operator&(EvalFlags a, EvalFlags b) {
  return static_cast<EvalFlags>(static_cast<unsigned>(a) & static_cast<unsigned>(b));
}
constexpr bool has(EvalFlags set, EvalFlags flag) {
  return (set & flag) == flag && flag != EvalFlags::None;
}

/// Values, spatial Jacobians and Laplacians of one layer's neurons at K points.
///
/// `jacobian[p](k, i)` is d psi_i / d x_p at point k; the Jacobian is kept as
/// d separate K x N blocks so every propagation step is a plain GEMM.
struct EvalBundle {
  Eigen::MatrixXd values;                 // K x N
  std::vector<Eigen::MatrixXd> jacobian;  // d blocks of K x N
  Eigen::MatrixXd laplacian;              // K x N
  EvalFlags flags = EvalFlags::None;

  Eigen::Index points() const;
  Eigen::Index neurons() const;
  int dim() const { return static_cast<int>(jacobian.size()); }
  double jac(Eigen::Index k, Eigen::Index i, int p) const { return jacobian[p](k, i); }
};

/// First layer: z = gamma (a^T (x - x_c) + R r), psi = tanh z.
EvalBundle eval_layer1(const FeatureNetwork& net, const PointMatrix& points,
                       EvalFlags flags = EvalFlags::All);

/// Layer l from layer l-1 via phi = W psi_{l-1}:
///   grad psi_i = tanh'(phi_i) (W J)_i
///   lap psi_i  = tanh''(phi_i) |(W J)_i|^2 + tanh'(phi_i) (W lap)_i
/// Needs values of the previous layer, plus its Jacobian (and Laplacian) when
/// those are requested here.
EvalBundle propagate_layer(const EvalBundle& prev, const Eigen::MatrixXd& weights,
                           EvalFlags flags = EvalFlags::All);

inline constexpr Eigen::Index kDefaultBlockSize = 1024;

/// Last-layer bundle at all points, processed in blocks of `block_size` rows.
EvalBundle evaluate(const FeatureNetwork& net, const PointMatrix& points,
                    EvalFlags flags = EvalFlags::All,
                    Eigen::Index block_size = kDefaultBlockSize);

/// Streams last-layer bundles block by block; `visit(first_row, bundle)`.
void evaluate_blocks(const FeatureNetwork& net, const PointMatrix& points, EvalFlags flags,
                     Eigen::Index block_size,
                     const std::function<void(Eigen::Index, const EvalBundle&)>& visit);

/// Activations of every hidden layer (values only), first layer first.
std::vector<Eigen::MatrixXd> evaluate_layers(const FeatureNetwork& net,
                                             const PointMatrix& points);

/// u_NN = Psi alpha for the given output field.
Eigen::VectorXd predict(const FeatureNetwork& net, const PointMatrix& points, int field = 0,
                        Eigen::Index block_size = kDefaultBlockSize);

}  // namespace gtransnet
