#include "gtransnet/assembly.hpp"

#include <cmath>

#include "gtransnet/errors.hpp"

namespace gtransnet {
namespace {

const PointMatrix& points_for(PointRole role, const CollocationSet& colloc,
                              const PointMatrix& images, const Equation* eq) {
  switch (role) {
    case PointRole::Interior: return colloc.interior;
    case PointRole::Boundary: return colloc.boundary;
    case PointRole::BoundaryImage: return images;
    case PointRole::Pin: return eq->pin_points;
  }
  throw InvalidArgument("unknown point role");
}

bool is_interior_group(PointRole role) { return role == PointRole::Interior; }

double row_block_max(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, Eigen::Index first,
                     Eigen::Index count) {
  if (count == 0) return 0.0;
  const double mat = m.cols() ? m.middleRows(first, count).cwiseAbs().maxCoeff() : 0.0;
  return std::max(mat, rhs.segment(first, count).cwiseAbs().maxCoeff());
}

double penalty_from_max(double max_abs, const char* group, bool& degenerate) {
  if (!std::isfinite(max_abs)) throw NumericalError(std::string("non-finite entries in ") + group + " rows");
  if (max_abs == 0.0) {
    log_warning(std::string("all ") + group + " rows and data are zero; using penalty 1");
    degenerate = true;
    return 1.0;
  }
  return 1.0 / max_abs;
}

}  // namespace

ScalarField constant_field(double value) {
  return [value](const PointBlock& b) { return Eigen::VectorXd::Constant(b.points.rows(), value); };
}

ScalarField pointwise_field(std::function<double(const double*)> f) {
  return [f = std::move(f)](const PointBlock& b) {
    Eigen::VectorXd out(b.points.rows());
    Eigen::VectorXd x(b.points.cols());
    for (Eigen::Index k = 0; k < b.points.rows(); ++k) {
      x = b.points.row(k).transpose();
      out[k] = f(x.data());
    }
    return out;
  };
}

VectorField pointwise_vector_field(int dim, std::function<void(const double*, double*)> f) {
  return [dim, f = std::move(f)](const PointBlock& b) {
    Eigen::MatrixXd out(b.points.rows(), dim);
    Eigen::VectorXd x(b.points.cols());
    Eigen::VectorXd v(dim);
    for (Eigen::Index k = 0; k < b.points.rows(); ++k) {
      x = b.points.row(k).transpose();
      f(x.data(), v.data());
      out.row(k) = v.transpose();
    }
    return out;
  };
}

ScalarField interior_data_field(Eigen::VectorXd values) {
  return [values = std::move(values)](const PointBlock& b) -> Eigen::VectorXd {
    if (b.role != PointRole::Interior || b.offset + b.points.rows() > values.size()) {
      throw InvalidArgument("interior data field evaluated outside the interior set");
    }
    return values.segment(b.offset, b.points.rows());
  };
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Identity: return "identity-trace";
    case OperatorKind::NegativeLaplacian: return "negative-laplacian";
    case OperatorKind::Helmholtz: return "helmholtz";
    case OperatorKind::ReactionShiftedLaplacian: return "reaction-shifted-laplacian";
    case OperatorKind::VariableDiffusion: return "variable-diffusion";
    case OperatorKind::ConvectionDiffusion: return "stokes-block";
    case OperatorKind::GradientComponent: return "gradient-component";
    case OperatorKind::Directional: return "directional";
  }
  return "unknown";
}

OperatorDescriptor OperatorDescriptor::identity() { return OperatorDescriptor(OperatorKind::Identity); }

OperatorDescriptor OperatorDescriptor::negative_laplacian() {
  return OperatorDescriptor(OperatorKind::NegativeLaplacian);
}

OperatorDescriptor OperatorDescriptor::helmholtz(double wavenumber) {
  OperatorDescriptor op(OperatorKind::Helmholtz);
  op.scalar_ = wavenumber;
  return op;
}

OperatorDescriptor OperatorDescriptor::reaction_shifted_laplacian(double shift) {
  OperatorDescriptor op(OperatorKind::ReactionShiftedLaplacian);
  op.scalar_ = shift;
  return op;
}

OperatorDescriptor OperatorDescriptor::variable_diffusion(ScalarField coefficient,
                                                          VectorField gradient) {
  if (!coefficient || !gradient) throw InvalidArgument("variable diffusion needs A and grad A");
  OperatorDescriptor op(OperatorKind::VariableDiffusion);
  op.field_ = std::move(coefficient);
  op.vector_ = std::move(gradient);
  return op;
}

OperatorDescriptor OperatorDescriptor::convection_diffusion(double viscosity, VectorField velocity) {
  OperatorDescriptor op(OperatorKind::ConvectionDiffusion);
  op.scalar_ = viscosity;
  op.vector_ = std::move(velocity);
  return op;
}

OperatorDescriptor OperatorDescriptor::gradient_component(int axis) {
  if (axis < 0) throw InvalidArgument("gradient axis must be non-negative");
  OperatorDescriptor op(OperatorKind::GradientComponent);
  op.axis_ = axis;
  return op;
}

OperatorDescriptor OperatorDescriptor::directional(VectorField direction) {
  if (!direction) throw InvalidArgument("directional derivative needs a direction field");
  OperatorDescriptor op(OperatorKind::Directional);
  op.vector_ = std::move(direction);
  return op;
}

EvalFlags OperatorDescriptor::required_flags() const {
  switch (kind_) {
    case OperatorKind::Identity: return EvalFlags::Values;
    case OperatorKind::NegativeLaplacian: return EvalFlags::Laplacian;
    case OperatorKind::Helmholtz:
    case OperatorKind::ReactionShiftedLaplacian: return EvalFlags::Values | EvalFlags::Laplacian;
    case OperatorKind::VariableDiffusion: return EvalFlags::Jacobian | EvalFlags::Laplacian;
    case OperatorKind::ConvectionDiffusion:
      return vector_ ? EvalFlags::Jacobian | EvalFlags::Laplacian : EvalFlags::Laplacian;
    case OperatorKind::GradientComponent:
    case OperatorKind::Directional: return EvalFlags::Jacobian;
  }
  return EvalFlags::All;
}

OperatorCoefficients OperatorDescriptor::coefficients(const PointBlock& block) const {
  const Eigen::Index n = block.points.rows();
  const Eigen::Index d = block.points.cols();
  OperatorCoefficients c;
  switch (kind_) {
    case OperatorKind::Identity:
      c.value = Eigen::VectorXd::Ones(n);
      break;
    case OperatorKind::NegativeLaplacian:
      c.laplacian = Eigen::VectorXd::Constant(n, -1.0);
      break;
    case OperatorKind::Helmholtz:
      c.value = Eigen::VectorXd::Constant(n, -scalar_ * scalar_);
      c.laplacian = Eigen::VectorXd::Constant(n, -1.0);
      break;
    case OperatorKind::ReactionShiftedLaplacian:
      c.value = Eigen::VectorXd::Constant(n, scalar_);
      c.laplacian = Eigen::VectorXd::Constant(n, -1.0);
      break;
    case OperatorKind::VariableDiffusion:
      c.laplacian = -field_(block);
      c.gradient = -vector_(block);
      break;
    case OperatorKind::ConvectionDiffusion:
      c.laplacian = Eigen::VectorXd::Constant(n, -scalar_);
      if (vector_) c.gradient = vector_(block);
      break;
    case OperatorKind::GradientComponent:
      if (axis_ >= d) throw InvalidArgument("gradient axis exceeds the point dimension");
      c.gradient = Eigen::MatrixXd::Zero(n, d);
      c.gradient.col(axis_).setOnes();
      break;
    case OperatorKind::Directional:
      c.gradient = vector_(block);
      break;
  }
  if (c.gradient.size() && (c.gradient.rows() != n || c.gradient.cols() != d)) {
    throw InvalidArgument("vector coefficient field returned the wrong shape");
  }
  return c;
}

Eigen::MatrixXd apply_operator(const OperatorDescriptor& op, const EvalBundle& bundle,
                               const PointBlock& block) {
  const EvalFlags need = op.required_flags();
  if (has(need, EvalFlags::Jacobian) && !has(bundle.flags, EvalFlags::Jacobian)) {
    throw InvalidArgument(std::string(to_string(op.kind())) + " needs Jacobians in the bundle");
  }
  if (has(need, EvalFlags::Laplacian) && !has(bundle.flags, EvalFlags::Laplacian)) {
    throw InvalidArgument(std::string(to_string(op.kind())) + " needs Laplacians in the bundle");
  }
  if (bundle.points() != block.points.rows()) {
    throw InvalidArgument("bundle and point block sizes differ");
  }
  const OperatorCoefficients c = op.coefficients(block);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(bundle.points(), bundle.neurons());
  if (c.value.size()) out.noalias() += c.value.asDiagonal() * bundle.values;
  if (c.gradient.size()) {
    for (Eigen::Index p = 0; p < c.gradient.cols(); ++p) {
      if ((c.gradient.col(p).array() != 0).any()) {
        out.noalias() += c.gradient.col(p).asDiagonal() * bundle.jacobian[p];
      }
    }
  }
  if (c.laplacian.size()) out.noalias() += c.laplacian.asDiagonal() * bundle.laplacian;
  return out;
}

Penalties compute_penalties(const Eigen::MatrixXd& interior_rows, const Eigen::VectorXd& interior_rhs,
                            const Eigen::MatrixXd& boundary_rows,
                            const Eigen::VectorXd& boundary_rhs) {
  if (interior_rows.rows() != interior_rhs.size() || boundary_rows.rows() != boundary_rhs.size()) {
    throw InvalidArgument("penalty inputs have inconsistent row counts");
  }
  Penalties p;
  p.interior = penalty_from_max(row_block_max(interior_rows, interior_rhs, 0, interior_rows.rows()),
                                "interior", p.interior_degenerate);
  p.boundary = penalty_from_max(row_block_max(boundary_rows, boundary_rhs, 0, boundary_rows.rows()),
                                "boundary", p.boundary_degenerate);
  return p;
}

PointMatrix periodic_images(const Domain& domain, const CollocationSet& colloc) {
  PointMatrix images(colloc.boundary.rows(), colloc.boundary.cols());
  if (static_cast<Eigen::Index>(colloc.boundary_faces.size()) != colloc.boundary.rows()) {
    throw InvalidArgument("periodic rows need face metadata for every boundary point");
  }
  Eigen::VectorXd y(colloc.boundary.cols());
  for (Eigen::Index k = 0; k < colloc.boundary.rows(); ++k) {
    y = colloc.boundary.row(k).transpose();
    images.row(k) = domain.periodic_image({y.data(), static_cast<std::size_t>(y.size())},
                                          colloc.boundary_faces[k])
                        .transpose();
  }
  return images;
}

LeastSquaresSystem assemble(const LinearProblem& problem, const FeatureNetwork& net,
                            const CollocationSet& colloc, const Domain& domain,
                            const AssemblyOptions& options, FeatureCache* cache) {
  if (problem.dim != net.dim() || domain.dim() != net.dim()) {
    throw InvalidArgument("problem, domain and network dimensions differ");
  }
  if (problem.num_fields < 1) throw InvalidArgument("problem needs at least one field");
  const auto& eqs = problem.equations;
  const Eigen::Index n = net.last_width();

  bool any_periodic = false;
  for (const auto& eq : eqs) any_periodic |= eq.periodic;
  const PointMatrix images = any_periodic ? periodic_images(domain, colloc) : PointMatrix();

  // Row layout: each equation's rows are contiguous, in declaration order.
  std::vector<Eigen::Index> row_start(eqs.size());
  Eigen::Index total_rows = 0;
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    const auto& eq = eqs[e];
    if (eq.periodic && eq.role != PointRole::Boundary) {
      throw InvalidArgument("periodic equations must live on the boundary set");
    }
    if (!eq.periodic && !eq.rhs) throw InvalidArgument("equation '" + eq.name + "' has no rhs");
    for (const auto& t : eq.terms) {
      if (t.field < 0 || t.field >= problem.num_fields) throw InvalidArgument("term field out of range");
    }
    row_start[e] = total_rows;
    total_rows += points_for(eq.role, colloc, images, &eq).rows();
  }

  LeastSquaresSystem sys;
  sys.num_fields = problem.num_fields;
  sys.field_columns = n;
  sys.matrix = Eigen::MatrixXd::Zero(total_rows, n * problem.num_fields);
  sys.rhs = Eigen::VectorXd::Zero(total_rows);
  sys.rows.reserve(static_cast<std::size_t>(total_rows));
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    sys.equation_roles.push_back(eqs[e].role);
    const Eigen::Index count = points_for(eqs[e].role, colloc, images, &eqs[e]).rows();
    for (Eigen::Index k = 0; k < count; ++k) sys.rows.push_back({static_cast<int>(e), k});
  }

  // Right-hand sides over whole point sets.
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    if (eqs[e].periodic) continue;
    const PointMatrix& pts = points_for(eqs[e].role, colloc, images, &eqs[e]);
    if (pts.rows() == 0) continue;
    const Eigen::VectorXd f = eqs[e].rhs(PointBlock{pts, eqs[e].role, 0});
    if (f.size() != pts.rows()) throw InvalidArgument("rhs field returned the wrong length");
    sys.rhs.segment(row_start[e], pts.rows()) = f;
  }

  // Fill operator rows from one point set's bundles.
  auto fill = [&](PointRole set_role, const std::vector<std::size_t>& members, double sign,
                  Eigen::Index start, const EvalBundle& bundle, const PointMatrix& block_pts) {
    const PointBlock block{block_pts, set_role, start};
    for (std::size_t e : members) {
      for (const auto& term : eqs[e].terms) {
        const Eigen::MatrixXd rows = apply_operator(term.op, bundle, block);
        auto target = sys.matrix.block(row_start[e] + start, term.field * n, rows.rows(), n);
        if (sign > 0) {
          target += rows;
        } else {
          target -= rows;
        }
      }
    }
  };

  auto process_set = [&](PointRole set_role, const PointMatrix& pts,
                         const std::vector<std::size_t>& members, double sign,
                         std::optional<EvalBundle>* slot) {
    if (members.empty() || pts.rows() == 0) return;
    EvalFlags flags = EvalFlags::Values;
    for (std::size_t e : members) {
      for (const auto& t : eqs[e].terms) flags = flags | t.op.required_flags();
    }
    if (slot) {
      if (!slot->has_value() || !has((*slot)->flags, flags)) {
        *slot = evaluate(net, pts, flags, options.block_size);
      }
      fill(set_role, members, sign, 0, **slot, pts);
      return;
    }
    evaluate_blocks(net, pts, flags, options.block_size,
                    [&](Eigen::Index start, const EvalBundle& bundle) {
                      const PointMatrix block_pts = pts.middleRows(start, bundle.points());
                      fill(set_role, members, sign, start, bundle, block_pts);
                    });
  };

  std::vector<std::size_t> interior_eqs, boundary_eqs, periodic_eqs;
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    if (eqs[e].role == PointRole::Interior) interior_eqs.push_back(e);
    if (eqs[e].role == PointRole::Boundary) boundary_eqs.push_back(e);
    if (eqs[e].periodic) periodic_eqs.push_back(e);
  }
  if (cache && cache->pins.size() < eqs.size()) cache->pins.resize(eqs.size());

  process_set(PointRole::Interior, colloc.interior, interior_eqs, 1.0,
              cache ? &cache->interior : nullptr);
  process_set(PointRole::Boundary, colloc.boundary, boundary_eqs, 1.0,
              cache ? &cache->boundary : nullptr);
  // Periodic rows: subtract the same operator at the image points.
  process_set(PointRole::BoundaryImage, images, periodic_eqs, -1.0,
              cache ? &cache->boundary_image : nullptr);
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    if (eqs[e].role != PointRole::Pin) continue;
    process_set(PointRole::Pin, eqs[e].pin_points, {e}, 1.0, cache ? &cache->pins[e] : nullptr);
  }

  if (!sys.matrix.allFinite() || !sys.rhs.allFinite()) {
    throw NumericalError("assembled system contains non-finite entries");
  }

  // Penalty weights over the unscaled row groups.
  double interior_max = 0, boundary_max = 0;
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    const Eigen::Index count = points_for(eqs[e].role, colloc, images, &eqs[e]).rows();
    const double m = row_block_max(sys.matrix, sys.rhs, row_start[e], count);
    (is_interior_group(eqs[e].role) ? interior_max : boundary_max) =
        std::max(is_interior_group(eqs[e].role) ? interior_max : boundary_max, m);
  }
  if (options.apply_penalties) {
    Penalties& p = sys.penalties;
    const bool has_interior = !interior_eqs.empty();
    const bool has_boundary = eqs.size() > interior_eqs.size();
    if (has_interior) p.interior = penalty_from_max(interior_max, "interior", p.interior_degenerate);
    if (has_boundary) p.boundary = penalty_from_max(boundary_max, "boundary", p.boundary_degenerate);
    for (std::size_t e = 0; e < eqs.size(); ++e) {
      const Eigen::Index count = points_for(eqs[e].role, colloc, images, &eqs[e]).rows();
      const double lambda = is_interior_group(eqs[e].role) ? p.interior : p.boundary;
      sys.matrix.middleRows(row_start[e], count) *= lambda;
      sys.rhs.segment(row_start[e], count) *= lambda;
    }
  }
  return sys;
}

}  // namespace gtransnet
