#include "gtransnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "gtransnet/errors.hpp"
#include "gtransnet/rng.hpp"

namespace gtransnet {
namespace {

using std::numbers::pi;

constexpr int kKitePolylineSize = 4096;
constexpr double kGoldenFraction = 0.6180339887498949;

Eigen::Vector2d kite_point(double t) {
  return {0.5 * std::cos(t) + 0.3 * std::cos(2.0 * t) - 0.2, 0.6 * std::sin(t)};
}

double flower_radius(double t) { return 0.5 - 0.1 * std::cos(6.0 * t); }

Eigen::Vector2d flower_point(double t) {
  const double r = flower_radius(t);
  return {r * std::cos(t), r * std::sin(t)};
}

std::shared_ptr<const std::vector<Eigen::Vector2d>> kite_polyline() {
  static const auto polyline = [] {
    auto pts = std::make_shared<std::vector<Eigen::Vector2d>>();
    pts->reserve(kKitePolylineSize);
    for (int i = 0; i < kKitePolylineSize; ++i) {
      pts->push_back(kite_point(2.0 * pi * i / kKitePolylineSize));
    }
    return std::shared_ptr<const std::vector<Eigen::Vector2d>>(std::move(pts));
  }();
  return polyline;
}

// Winding number of a closed polyline around p.
int winding_number(const std::vector<Eigen::Vector2d>& poly, double px,
                   double py) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % n];
    const double side = (b.x() - a.x()) * (py - a.y()) - (px - a.x()) * (b.y() - a.y());
    if (a.y() <= py) {
      if (b.y() > py && side > 0) ++wn;
    } else {
      if (b.y() <= py && side < 0) --wn;
    }
  }
  return wn;
}

struct Segment {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
  int face;
};

std::vector<Segment> polygon_segments(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitSquare:
    case DomainKind::ShiftedSquare: {
      const double x0 = kind == DomainKind::UnitSquare ? 0.0 : 4.0;
      const double y0 = kind == DomainKind::UnitSquare ? 0.0 : 7.0;
      const Eigen::Vector2d p0(x0, y0), p1(x0 + 1, y0), p2(x0 + 1, y0 + 1),
          p3(x0, y0 + 1);
      return {{p0, p1, 2}, {p1, p2, 1}, {p2, p3, 3}, {p3, p0, 0}};
    }
    case DomainKind::LShape: {
      const std::vector<Eigen::Vector2d> v = {{0, 0},     {1, 0},   {1, 0.5},
                                              {0.5, 0.5}, {0.5, 1}, {0, 1}};
      std::vector<Segment> segs;
      for (std::size_t i = 0; i < v.size(); ++i) {
        segs.push_back({v[i], v[(i + 1) % v.size()], -1});
      }
      return segs;
    }
    default:
      return {};
  }
}

double segment_distance(const Segment& s, double px, double py) {
  const Eigen::Vector2d d = s.b - s.a;
  const Eigen::Vector2d p(px, py);
  const double t = std::clamp((p - s.a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (p - (s.a + t * d)).norm();
}

// Largest-remainder split of `count` proportional to `weights`.
std::vector<std::size_t> proportional_split(std::size_t count,
                                            const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = count * weights[i] / total;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    remainders.emplace_back(exact - out[i], i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) {
    ++out[remainders[k % remainders.size()].second];
  }
  return out;
}

void check_dim(const Domain& domain, std::size_t n) {
  if (static_cast<int>(n) != domain.dim()) {
    throw InvalidArgument("point dimension " + std::to_string(n) +
                          " does not match domain dimension " +
                          std::to_string(domain.dim()));
  }
}

}  // namespace

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitSquare: return "unit-square";
    case DomainKind::ShiftedSquare: return "shifted-square";
    case DomainKind::Kite: return "kite";
    case DomainKind::Flower: return "flower";
    case DomainKind::LShape: return "l-shape";
    case DomainKind::Ball3D: return "ball3d";
    case DomainKind::Box3D: return "box3d";
    case DomainKind::Interval: return "interval";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(std::string_view name) {
  for (auto k : {DomainKind::UnitSquare, DomainKind::ShiftedSquare,
                 DomainKind::Kite, DomainKind::Flower, DomainKind::LShape,
                 DomainKind::Ball3D, DomainKind::Box3D, DomainKind::Interval}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown domain '" + std::string(name) + "'");
}

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::Random ? "random" : "grid";
}

SamplingMode sampling_mode_from_string(std::string_view name) {
  if (name == "random") return SamplingMode::Random;
  if (name == "grid") return SamplingMode::Grid;
  throw InvalidArgument("unknown sampling mode '" + std::string(name) + "'");
}

bool EnclosingBall::contains(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != center.size()) {
    throw InvalidArgument("ball dimension mismatch");
  }
  double r2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - center[static_cast<Eigen::Index>(i)];
    r2 += d * d;
  }
  return r2 < radius * radius;
}

Domain::Domain(DomainKind kind, int dim, Eigen::VectorXd lo, Eigen::VectorXd hi)
    : kind_(kind), dim_(dim), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (kind_ == DomainKind::Kite) polyline_ = kite_polyline();
}

Domain::Domain(DomainKind kind) : kind_(kind), dim_(2) {
  switch (kind) {
    case DomainKind::UnitSquare:
    case DomainKind::LShape:
      lo_ = Eigen::Vector2d(0, 0);
      hi_ = Eigen::Vector2d(1, 1);
      break;
    case DomainKind::ShiftedSquare:
      lo_ = Eigen::Vector2d(4, 7);
      hi_ = Eigen::Vector2d(5, 8);
      break;
    case DomainKind::Kite:
      lo_ = Eigen::Vector2d(-0.61, -0.61);
      hi_ = Eigen::Vector2d(0.61, 0.61);
      polyline_ = kite_polyline();
      break;
    case DomainKind::Flower:
      lo_ = Eigen::Vector2d(-0.6, -0.6);
      hi_ = Eigen::Vector2d(0.6, 0.6);
      break;
    case DomainKind::Ball3D:
      dim_ = 3;
      lo_ = Eigen::Vector3d::Constant(-0.5);
      hi_ = Eigen::Vector3d::Constant(0.5);
      break;
    case DomainKind::Box3D:
      dim_ = 3;
      lo_ = Eigen::Vector3d::Zero();
      hi_ = Eigen::Vector3d::Ones();
      break;
    case DomainKind::Interval:
      dim_ = 1;
      lo_ = Eigen::VectorXd::Constant(1, -1.0);
      hi_ = Eigen::VectorXd::Constant(1, 1.0);
      break;
  }
}

Domain Domain::interval(double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("interval requires lo < hi");
  return Domain(DomainKind::Interval, 1, Eigen::VectorXd::Constant(1, lo),
                Eigen::VectorXd::Constant(1, hi));
}

std::string Domain::name() const { return std::string(to_string(kind_)); }

bool Domain::contains(std::span<const double> x) const {
  check_dim(*this, x.size());
  return contains_impl(x.data());
}

bool Domain::contains(const Eigen::VectorXd& x) const {
  return contains(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

bool Domain::contains_impl(const double* x) const {
  switch (kind_) {
    case DomainKind::UnitSquare:
    case DomainKind::ShiftedSquare:
    case DomainKind::Box3D:
    case DomainKind::Interval:
      for (int i = 0; i < dim_; ++i) {
        if (!(x[i] > lo_[i] && x[i] < hi_[i])) return false;
      }
      return true;
    case DomainKind::LShape:
      if (!(x[0] > 0 && x[0] < 1 && x[1] > 0 && x[1] < 1)) return false;
      return !(x[0] >= 0.5 && x[1] >= 0.5);
    case DomainKind::Kite:
      return winding_number(*polyline_, x[0], x[1]) != 0;
    case DomainKind::Flower: {
      const double r = std::hypot(x[0], x[1]);
      return r < flower_radius(std::atan2(x[1], x[0]));
    }
    case DomainKind::Ball3D:
      return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < 0.25;
  }
  return false;
}

EnclosingBall Domain::default_ball() const {
  EnclosingBall ball;
  switch (kind_) {
    case DomainKind::Kite:
    case DomainKind::Flower:
      ball.center = Eigen::Vector2d::Zero();
      break;
    case DomainKind::Ball3D:
      ball.center = Eigen::Vector3d::Zero();
      break;
    case DomainKind::Interval:
      ball.center = 0.5 * (lo_ + hi_);
      ball.radius = 1.1 * 0.5 * (hi_[0] - lo_[0]);
      return ball;
    default:
      ball.center = 0.5 * (lo_ + hi_);
      break;
  }
  ball.radius = 0.8;
  return ball;
}

double Domain::covering_radius(const Eigen::VectorXd& center) const {
  check_dim(*this, static_cast<std::size_t>(center.size()));
  double best = 0;
  switch (kind_) {
    case DomainKind::Kite:
    case DomainKind::Flower:
      for (int i = 0; i < 200000; ++i) {
        best = std::max(best, (curve_point(2 * pi * i / 200000) - center.head<2>()).norm());
      }
      return best;
    case DomainKind::Ball3D:
      return 0.5 + center.norm();
    case DomainKind::LShape:
      for (const auto& s : polygon_segments(kind_)) {
        best = std::max(best, (s.a - center.head<2>()).norm());
      }
      return best;
    default: {
      // Box-like: farthest corner.
      const int corners = 1 << dim_;
      for (int c = 0; c < corners; ++c) {
        double r2 = 0;
        for (int i = 0; i < dim_; ++i) {
          const double v = (c >> i) & 1 ? hi_[i] : lo_[i];
          r2 += (v - center[i]) * (v - center[i]);
        }
        best = std::max(best, std::sqrt(r2));
      }
      return best;
    }
  }
}

Eigen::Vector2d Domain::curve_point(double theta) const {
  if (kind_ == DomainKind::Kite) return kite_point(theta);
  if (kind_ == DomainKind::Flower) return flower_point(theta);
  throw InvalidArgument("curve_point is defined for kite and flower only");
}

double Domain::boundary_residual(std::span<const double> x) const {
  check_dim(*this, x.size());
  switch (kind_) {
    case DomainKind::UnitSquare:
    case DomainKind::ShiftedSquare:
    case DomainKind::LShape: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : polygon_segments(kind_)) {
        best = std::min(best, segment_distance(s, x[0], x[1]));
      }
      return best;
    }
    case DomainKind::Box3D:
    case DomainKind::Interval: {
      // Distance to the nearest face, provided the point lies in the closed box.
      double outside = 0, nearest = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim_; ++i) {
        outside = std::max({outside, lo_[i] - x[i], x[i] - hi_[i]});
        nearest = std::min({nearest, std::abs(x[i] - lo_[i]), std::abs(x[i] - hi_[i])});
      }
      return std::max(outside, nearest);
    }
    case DomainKind::Ball3D:
      return std::abs(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - 0.5);
    case DomainKind::Flower:
      return std::abs(std::hypot(x[0], x[1]) - flower_radius(std::atan2(x[1], x[0])));
    case DomainKind::Kite: {
      // y = 0.6 sin t fixes sin t; the two branches of cos t give the candidates.
      const double s = x[1] / 0.6;
      if (std::abs(s) > 1) return std::abs(std::abs(x[1]) - 0.6);
      const double c = std::sqrt((1 - s) * (1 + s));
      const double cos2 = 1 - 2 * s * s;
      const double xa = 0.5 * c + 0.3 * cos2 - 0.2;
      const double xb = -0.5 * c + 0.3 * cos2 - 0.2;
      return std::min(std::abs(x[0] - xa), std::abs(x[0] - xb));
    }
  }
  return std::numeric_limits<double>::infinity();
}

int Domain::face_count() const {
  switch (kind_) {
    case DomainKind::UnitSquare:
    case DomainKind::ShiftedSquare:
    case DomainKind::Box3D:
    case DomainKind::Interval:
      return 2 * dim_;
    default:
      return 0;
  }
}

int Domain::face_of(std::span<const double> x) const {
  check_dim(*this, x.size());
  if (face_count() == 0) return -1;
  for (int i = 0; i < dim_; ++i) {
    if (std::abs(x[i] - lo_[i]) < 1e-12) return 2 * i;
    if (std::abs(x[i] - hi_[i]) < 1e-12) return 2 * i + 1;
  }
  return -1;
}

Eigen::VectorXd Domain::periodic_image(std::span<const double> x, int face) const {
  check_dim(*this, x.size());
  if (face < 0 || face >= face_count()) {
    throw InvalidArgument("periodic image requires a face of a box-like domain");
  }
  Eigen::VectorXd out = Eigen::Map<const Eigen::VectorXd>(x.data(), dim_);
  const int axis = face / 2;
  out[axis] = (face % 2 == 0) ? hi_[axis] : lo_[axis];
  return out;
}

PointMatrix sample_interior(const Domain& domain, std::size_t count,
                            std::uint64_t seed, const SampleOptions& options) {
  if (count == 0) throw InvalidArgument("sample_interior requires count >= 1");
  const int d = domain.dim();
  const Eigen::VectorXd& lo = domain.box_lo();
  const Eigen::VectorXd& hi = domain.box_hi();

  if (options.mode == SamplingMode::Grid) {
    auto per_axis = static_cast<std::size_t>(std::llround(std::pow(double(count), 1.0 / d)));
    per_axis = std::max<std::size_t>(per_axis, 1);
    auto total = [&](std::size_t n) {
      std::size_t t = 1;
      for (int i = 0; i < d; ++i) t *= n;
      return t;
    };
    while (total(per_axis) < count) ++per_axis;
    std::vector<Eigen::VectorXd> kept;
    Eigen::VectorXd x(d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t flat = 0; flat < total(per_axis); ++flat) {
      std::size_t rest = flat;
      for (int i = 0; i < d; ++i) {
        idx[i] = rest % per_axis;
        rest /= per_axis;
        x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / per_axis;
      }
      if (domain.contains(x)) kept.push_back(x);
    }
    PointMatrix out(static_cast<Eigen::Index>(kept.size()), d);
    for (std::size_t k = 0; k < kept.size(); ++k) out.row(k) = kept[k].transpose();
    return out;
  }

  PhiloxEngine rng = make_stream(seed, "interior");
  PointMatrix out(static_cast<Eigen::Index>(count), d);
  const std::size_t cap = options.max_attempts_per_point * count;
  std::size_t attempts = 0;
  Eigen::VectorXd x(d);
  for (std::size_t k = 0; k < count;) {
    if (++attempts > cap) {
      throw NumericalError("rejection sampling exceeded " + std::to_string(cap) +
                           " attempts for domain " + domain.name());
    }
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
    if (domain.contains(x)) out.row(static_cast<Eigen::Index>(k++)) = x.transpose();
  }
  return out;
}

BoundarySample sample_boundary(const Domain& domain, std::size_t count,
                               std::uint64_t seed, SamplingMode mode) {
  if (count == 0) throw InvalidArgument("sample_boundary requires count >= 1");
  const int d = domain.dim();
  BoundarySample out;
  out.points.resize(static_cast<Eigen::Index>(count), d);
  out.faces.assign(count, -1);
  PhiloxEngine rng = make_stream(seed, "boundary");

  switch (domain.kind()) {
    case DomainKind::UnitSquare:
    case DomainKind::ShiftedSquare:
    case DomainKind::LShape: {
      const auto segs = polygon_segments(domain.kind());
      std::vector<double> lengths;
      for (const auto& s : segs) lengths.push_back((s.b - s.a).norm());
      if (mode == SamplingMode::Grid) {
        const auto per_edge = proportional_split(count, lengths);
        Eigen::Index k = 0;
        for (std::size_t e = 0; e < segs.size(); ++e) {
          for (std::size_t i = 0; i < per_edge[e]; ++i, ++k) {
            const double t = (i + 0.5) / per_edge[e];
            out.points.row(k) = (segs[e].a + t * (segs[e].b - segs[e].a)).transpose();
            out.faces[k] = segs[e].face;
          }
        }
      } else {
        double perimeter = 0;
        for (double l : lengths) perimeter += l;
        for (std::size_t k = 0; k < count; ++k) {
          double s = perimeter * rng.uniform();
          std::size_t e = 0;
          while (e + 1 < segs.size() && s >= lengths[e]) s -= lengths[e++];
          const double t = std::min(s / lengths[e], 1.0);
          out.points.row(k) = (segs[e].a + t * (segs[e].b - segs[e].a)).transpose();
          out.faces[k] = segs[e].face;
        }
      }
      break;
    }
    case DomainKind::Kite:
    case DomainKind::Flower:
      for (std::size_t k = 0; k < count; ++k) {
        const double t = mode == SamplingMode::Grid ? 2 * pi * k / count
                                                    : 2 * pi * rng.uniform();
        out.points.row(k) = domain.curve_point(t).transpose();
      }
      break;
    case DomainKind::Ball3D: {
      std::normal_distribution<double> normal;
      for (std::size_t k = 0; k < count; ++k) {
        Eigen::Vector3d z;
        if (mode == SamplingMode::Grid) {
          // Fibonacci lattice on the sphere.
          const double h = 1.0 - 2.0 * (k + 0.5) / count;
          const double rho = std::sqrt(std::max(0.0, 1 - h * h));
          const double phi = 2 * pi * std::fmod(k * kGoldenFraction, 1.0);
          z = Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi), h);
        } else {
          do {
            z = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
          } while (z.norm() < 1e-300);
        }
        out.points.row(k) = (0.5 * z / z.norm()).transpose();
      }
      break;
    }
    case DomainKind::Box3D: {
      const auto& lo = domain.box_lo();
      const auto& hi = domain.box_hi();
      std::vector<std::size_t> per_face;
      if (mode == SamplingMode::Grid) per_face = proportional_split(count, std::vector<double>(6, 1.0));
      std::size_t k = 0;
      for (int f = 0; f < 6 && k < count; ++f) {
        const std::size_t n = mode == SamplingMode::Grid ? per_face[f] : 0;
        for (std::size_t i = 0; i < n; ++i, ++k) {
          Eigen::Vector3d x;
          const int axis = f / 2;
          const double u = (i + 0.5) / n;
          const double v = std::fmod((i + 0.5) * kGoldenFraction, 1.0);
          int slot = 0;
          for (int a = 0; a < 3; ++a) {
            if (a == axis) {
              x[a] = f % 2 == 0 ? lo[a] : hi[a];
            } else {
              const double w = slot++ == 0 ? u : v;
              x[a] = lo[a] + (hi[a] - lo[a]) * w;
            }
          }
          out.points.row(static_cast<Eigen::Index>(k)) = x.transpose();
          out.faces[k] = f;
        }
      }
      for (; k < count; ++k) {
        const int f = std::min(5, static_cast<int>(6 * rng.uniform()));
        const int axis = f / 2;
        Eigen::Vector3d x;
        for (int a = 0; a < 3; ++a) {
          x[a] = a == axis ? (f % 2 == 0 ? lo[a] : hi[a])
                           : lo[a] + (hi[a] - lo[a]) * rng.uniform();
        }
        out.points.row(static_cast<Eigen::Index>(k)) = x.transpose();
        out.faces[k] = f;
      }
      break;
    }
    case DomainKind::Interval:
      for (std::size_t k = 0; k < count; ++k) {
        out.faces[k] = static_cast<int>(k % 2);
        out.points(static_cast<Eigen::Index>(k), 0) =
            k % 2 == 0 ? domain.box_lo()[0] : domain.box_hi()[0];
      }
      break;
  }
  return out;
}

CollocationSet make_collocation(const Domain& domain,
                                const CollocationCounts& counts,
                                std::uint64_t seed, std::uint64_t test_seed,
                                SamplingMode interior_mode,
                                SamplingMode boundary_mode) {
  CollocationSet set;
  set.seed = seed;
  set.interior_mode = interior_mode;
  set.boundary_mode = boundary_mode;
  set.interior = sample_interior(domain, counts.interior, seed, {.mode = interior_mode});
  auto bdy = sample_boundary(domain, counts.boundary, seed, boundary_mode);
  set.boundary = std::move(bdy.points);
  set.boundary_faces = std::move(bdy.faces);
  // Test points always come from random sampling under their own seed.
  PhiloxEngine probe = make_stream(test_seed, "test");
  set.test = sample_interior(domain, counts.test, probe(), {.mode = SamplingMode::Random});
  return set;
}

void write_points_csv(std::ostream& out, const CollocationSet& set) {
  const Eigen::Index d = set.interior.cols();
  static const char* names[] = {"x", "y", "z"};
  for (Eigen::Index i = 0; i < d; ++i) out << names[i] << ',';
  out << "role\n";
  out.precision(17);
  auto dump = [&](const PointMatrix& pts, const char* role) {
    for (Eigen::Index k = 0; k < pts.rows(); ++k) {
      for (Eigen::Index i = 0; i < d; ++i) out << pts(k, i) << ',';
      out << role << '\n';
    }
  };
  dump(set.interior, "interior");
  dump(set.boundary, "boundary");
  dump(set.test, "test");
}

}  // namespace gtransnet
