#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gtransnet {

/// Point sets are stored one point per row.
using PointMatrix = Eigen::MatrixXd;

enum class DomainKind {
  UnitSquare,     // (0,1)^2
  ShiftedSquare,  // (4,5) x (7,8)
  Kite,           // x = 0.5 cos t + 0.3 cos 2t - 0.2, y = 0.6 sin t
  Flower,         // r(t) = 0.5 - 0.1 cos 6t
  LShape,         // (0,1)^2 minus [0.5,1]^2
  Ball3D,         // |x| < 0.5
  Box3D,          // (0,1)^3
  Interval,       // (lo, hi), one-dimensional
};

std::string_view to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view name);

enum class SamplingMode { Random, Grid };

std::string_view to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(std::string_view name);

struct EnclosingBall {
  Eigen::VectorXd center;
  double radius = 0.8;

  bool contains(std::span<const double> x) const;
};

class Domain {
 public:
  explicit Domain(DomainKind kind);
  static Domain interval(double lo, double hi);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::string name() const;

  /// Axis-aligned bounding box used by rejection sampling.
  const Eigen::VectorXd& box_lo() const { return lo_; }
  const Eigen::VectorXd& box_hi() const { return hi_; }

  /// Membership in the open domain. Throws on dimension mismatch.
  bool contains(std::span<const double> x) const;
  bool contains(const Eigen::VectorXd& x) const;

  /// Enclosing ball used for hidden-layer sampling: the geometric centre of
  /// the bounding box with radius 0.8 (1.1 for intervals of unit half-width).
  EnclosingBall default_ball() const;

  /// Largest distance from `center` to a boundary point (dense sampling).
  double covering_radius(const Eigen::VectorXd& center) const;

  /// Point on the boundary curve at parameter theta (Kite, Flower only).
  Eigen::Vector2d curve_point(double theta) const;

  /// Residual of the boundary equation at `x`; zero on the boundary.
  double boundary_residual(std::span<const double> x) const;

  /// Face index of a boundary point for box-like domains, -1 otherwise.
  int face_of(std::span<const double> x) const;

  /// Periodic image of a boundary point on the opposite face (Box3D, squares).
  Eigen::VectorXd periodic_image(std::span<const double> x, int face) const;

  /// Number of faces for periodic pairing (0 for curved domains).
  int face_count() const;

 private:
  Domain(DomainKind kind, int dim, Eigen::VectorXd lo, Eigen::VectorXd hi);

  bool contains_impl(const double* x) const;

  DomainKind kind_;
  int dim_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
  // Polyline of the kite boundary for winding-number membership.
  std::shared_ptr<const std::vector<Eigen::Vector2d>> polyline_;
};

struct SampleOptions {
  SamplingMode mode = SamplingMode::Random;
  std::size_t max_attempts_per_point = 1000;
};

/// `count` points uniformly distributed in the open domain. In grid mode a
/// tensor grid with ceil(count^(1/d)) nodes per axis is filtered by
/// membership, so the returned count may differ from the request.
PointMatrix sample_interior(const Domain& domain, std::size_t count,
                            std::uint64_t seed,
                            const SampleOptions& options = {});

struct BoundarySample {
  PointMatrix points;
  std::vector<int> faces;  // -1 for curved boundaries
};

BoundarySample sample_boundary(const Domain& domain, std::size_t count,
                               std::uint64_t seed,
                               SamplingMode mode = SamplingMode::Random);

struct CollocationSet {
  PointMatrix interior;
  PointMatrix boundary;
  std::vector<int> boundary_faces;
  PointMatrix test;
  std::uint64_t seed = 0;
  SamplingMode interior_mode = SamplingMode::Random;
  SamplingMode boundary_mode = SamplingMode::Random;

  Eigen::Index interior_count() const { return interior.rows(); }
  Eigen::Index boundary_count() const { return boundary.rows(); }
  Eigen::Index total() const { return interior.rows() + boundary.rows(); }
};

struct CollocationCounts {
  std::size_t interior = 900;
  std::size_t boundary = 200;
  std::size_t test = 10000;
};

/// Training points from `seed`, test points from the independent `test_seed`.
CollocationSet make_collocation(const Domain& domain,
                                const CollocationCounts& counts,
                                std::uint64_t seed, std::uint64_t test_seed,
                                SamplingMode interior_mode = SamplingMode::Random,
                                SamplingMode boundary_mode = SamplingMode::Random);

/// CSV with columns x[,y[,z]],role.
void write_points_csv(std::ostream& out, const CollocationSet& set);

}  // namespace gtransnet
