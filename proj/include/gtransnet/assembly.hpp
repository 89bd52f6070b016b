#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/featurenet.hpp"
#include "gtransnet/geometry.hpp"

namespace gtransnet {

/// Which collocation set an equation is enforced on.
enum class PointRole { Interior, Boundary, BoundaryImage, Pin };

/// A contiguous run of points from one collocation set. `offset` is the index
/// of the first row within that set, so data tied to collocation points (such
/// as a Picard iterate) can be looked up.
struct PointBlock {
  const PointMatrix& points;
  PointRole role;
  Eigen::Index offset;
};

/// Scalar coefficient field evaluated over a block of points.
using ScalarField = std::function<Eigen::VectorXd(const PointBlock&)>;
/// Vector field evaluated over a block; returns rows x d.
using VectorField = std::function<Eigen::MatrixXd(const PointBlock&)>;

ScalarField constant_field(double value);
ScalarField pointwise_field(std::function<double(const double*)> f);
VectorField pointwise_vector_field(int dim, std::function<void(const double*, double*)> f);
/// Field given by per-point values on the interior collocation set.
ScalarField interior_data_field(Eigen::VectorXd values);

enum class OperatorKind {
  Identity,                  // u                  (boundary trace)
  NegativeLaplacian,         // -lap u
  Helmholtz,                 // -lap u - k^2 u
  ReactionShiftedLaplacian,  // -lap u + c u
  VariableDiffusion,         // -div(A grad u) = -(A lap u + grad A . grad u)
  ConvectionDiffusion,       // -nu lap u + b . grad u   (Stokes block when b = 0)
  GradientComponent,         // d u / d x_p
  Directional,               // b . grad u
};

std::string_view to_string(OperatorKind kind);

/// Per-point coefficients of a linear second-order operator
///   L u = c0 u + c1 . grad u + c2 lap u.
struct OperatorCoefficients {
  Eigen::VectorXd value;      // c0, one entry per point
  Eigen::MatrixXd gradient;   // c1, rows x d (empty when unused)
  Eigen::VectorXd laplacian;  // c2 (empty when unused)
};

class OperatorDescriptor {
 public:
  static OperatorDescriptor identity();
  static OperatorDescriptor negative_laplacian();
  static OperatorDescriptor helmholtz(double wavenumber);
  static OperatorDescriptor reaction_shifted_laplacian(double shift);
  static OperatorDescriptor variable_diffusion(ScalarField coefficient, VectorField gradient);
  static OperatorDescriptor convection_diffusion(double viscosity, VectorField velocity);
  static OperatorDescriptor gradient_component(int axis);
  static OperatorDescriptor directional(VectorField direction);

  OperatorKind kind() const { return kind_; }
  /// Derivative data this operator reads from an EvalBundle.
  EvalFlags required_flags() const;
  OperatorCoefficients coefficients(const PointBlock& block) const;

 private:
  explicit OperatorDescriptor(OperatorKind kind) : kind_(kind) {}

  OperatorKind kind_;
  double scalar_ = 0;
  int axis_ = 0;
  ScalarField field_;
  VectorField vector_;
};

/// op applied to every neuron of `bundle`: entry (k, i) = L(psi_i)(x_k).
Eigen::MatrixXd apply_operator(const OperatorDescriptor& op, const EvalBundle& bundle,
                               const PointBlock& block);

struct Term {
  int field = 0;
  OperatorDescriptor op;
};

/// One family of rows: sum over terms of op(field) = rhs at each point of `role`.
/// For `periodic` equations the row is op(psi)(y) - op(psi)(y') with y' the
/// periodic image of boundary point y, and the rhs is zero.
struct Equation {
  std::string name;
  PointRole role = PointRole::Interior;
  std::vector<Term> terms;
  ScalarField rhs;
  bool periodic = false;
  PointMatrix pin_points;  // used when role == Pin
};

/// A linear(ized) PDE ready for assembly.
struct LinearProblem {
  int dim = 2;
  int num_fields = 1;
  std::vector<Equation> equations;
};

struct RowTag {
  int equation;
  Eigen::Index point;
};

struct Penalties {
  double interior = 1.0;
  double boundary = 1.0;
  bool interior_degenerate = false;
  bool boundary_degenerate = false;
};

struct LeastSquaresSystem {
  Eigen::MatrixXd matrix;  // penalty-scaled rows
  Eigen::VectorXd rhs;
  Penalties penalties;
  std::vector<RowTag> rows;
  std::vector<PointRole> equation_roles;
  int num_fields = 1;
  Eigen::Index field_columns = 0;
};

/// lambda = 1 / max_i max(max_j |F(i, j)|, |f_i|) per row group; a zero
/// maximum falls back to 1 with a warning.
Penalties compute_penalties(const Eigen::MatrixXd& interior_rows,
                            const Eigen::VectorXd& interior_rhs,
                            const Eigen::MatrixXd& boundary_rows,
                            const Eigen::VectorXd& boundary_rhs);

/// Cached last-layer bundles per point set, reused across Picard iterations.
struct FeatureCache {
  std::optional<EvalBundle> interior;
  std::optional<EvalBundle> boundary;
  std::optional<EvalBundle> boundary_image;
  std::vector<std::optional<EvalBundle>> pins;
};

struct AssemblyOptions {
  Eigen::Index block_size = kDefaultBlockSize;
  bool apply_penalties = true;
};

/// Periodic images of the boundary points (one per point, by face).
PointMatrix periodic_images(const Domain& domain, const CollocationSet& colloc);

/// Builds [lambda_1 F_pde; lambda_2 F_bdy] alpha = [lambda_1 f; lambda_2 g].
/// Columns are grouped per field: [alpha_0 | alpha_1 | ...]. When `cache` is
/// given, missing bundles are evaluated once and stored.
LeastSquaresSystem assemble(const LinearProblem& problem, const FeatureNetwork& net,
                            const CollocationSet& colloc, const Domain& domain,
                            const AssemblyOptions& options = {},
                            FeatureCache* cache = nullptr);

}  // namespace gtransnet
