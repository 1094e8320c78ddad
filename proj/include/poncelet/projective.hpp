#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poncelet/error.hpp"

namespace poncelet {

/// Default relative tolerance for incidence and coincidence tests. Geometric
/// quantities are compared relative to the diameter of the configuration.
inline constexpr double kDefaultTol = 1e-9;

/// Below this ratio |w| / max|component| a homogeneous point is treated as
/// ideal (at infinity).
inline constexpr double kIdealEps = 1e-12;

/// Homogeneous 3-vector defined up to nonzero scale. The tag keeps points and
/// lines from being mixed up at compile time.
template <class Tag>
class Homogeneous {
 public:
  explicit Homogeneous(const Eigen::Vector3d& v) : v_(v) {
    if (!v_.allFinite() || v_.cwiseAbs().maxCoeff() == 0.0) {
      fail(Errc::ZeroVector, "homogeneous vector must be finite and nonzero");
    }
  }
  Homogeneous(double x, double y, double w) : Homogeneous(Eigen::Vector3d(x, y, w)) {}

  static Homogeneous from_xy(const Eigen::Vector2d& xy) {
    return Homogeneous(Eigen::Vector3d(xy.x(), xy.y(), 1.0));
  }

  const Eigen::Vector3d& vec() const noexcept { return v_; }
  double operator[](int i) const { return v_[i]; }

  /// Canonical representative: divided by the component of largest absolute
  /// value, so ideal elements are representable.
  Homogeneous normalized() const {
    Eigen::Index idx = 0;
    v_.cwiseAbs().maxCoeff(&idx);
    return Homogeneous(v_ / v_[idx]);
  }

  /// Unit-norm representative (sign unchanged).
  Eigen::Vector3d unit() const { return v_.normalized(); }

  bool is_ideal() const { return std::abs(v_.z()) <= kIdealEps * v_.cwiseAbs().maxCoeff(); }

  std::optional<Eigen::Vector2d> affine() const {
    if (is_ideal()) return std::nullopt;
    return Eigen::Vector2d(v_.x() / v_.z(), v_.y() / v_.z());
  }

  /// Affine coordinates; throws for ideal elements.
  Eigen::Vector2d xy() const {
    auto a = affine();
    if (!a) fail(Errc::OutOfRange, "ideal point has no affine coordinates");
    return *a;
  }

  /// True when both represent the same projective element within `tol`.
  bool equivalent(const Homogeneous& other, double tol = kDefaultTol) const {
    return unit().cross(other.unit()).norm() <= tol;
  }

 private:
  Eigen::Vector3d v_;
};

struct PointTag {};
struct LineTag {};
using HomPoint = Homogeneous<PointTag>;
using HomLine = Homogeneous<LineTag>;

/// Scale-free incidence residual |l.p| / (|l| |p|).
inline double incidence(const HomLine& l, const HomPoint& p) {
  return std::abs(l.vec().dot(p.vec())) / (l.vec().norm() * p.vec().norm());
}

inline HomLine join(const HomPoint& p, const HomPoint& q) {
  const Eigen::Vector3d a = p.unit();
  const Eigen::Vector3d b = q.unit();
  const Eigen::Vector3d l = a.cross(b);
  if (l.norm() <= 1e-13) fail(Errc::CoincidentPoints, "cannot join coincident points");
  return HomLine(l).normalized();
}

/// Intersection of two lines; parallel lines meet in an ideal point.
inline HomPoint meet(const HomLine& l, const HomLine& m) {
  const Eigen::Vector3d a = l.unit();
  const Eigen::Vector3d b = m.unit();
  const Eigen::Vector3d p = a.cross(b);
  if (p.norm() <= 1e-13) fail(Errc::CoincidentLines, "cannot meet coincident lines");
  return HomPoint(p).normalized();
}

/// Invertible projective transformation of the plane, defined up to scale.
class ProjMap {
 public:
  ProjMap() : m_(Eigen::Matrix3d::Identity()) {}
  explicit ProjMap(const Eigen::Matrix3d& m) : m_(m) {
    const double scale = m_.norm();
    if (!m_.allFinite() || scale == 0.0 ||
        std::abs(m_.determinant()) <= 1e-12 * scale * scale * scale) {
      fail(Errc::SingularMap, "projective map is singular");
    }
  }

  static ProjMap diagonal(double a, double b, double c = 1.0) {
    return ProjMap(Eigen::Vector3d(a, b, c).asDiagonal().toDenseMatrix());
  }

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }

  HomPoint apply(const HomPoint& p) const { return HomPoint(m_ * p.vec()); }
  /// Lines transform by the inverse transpose, which preserves incidence.
  HomLine apply(const HomLine& l) const { return HomLine(m_.inverse().transpose() * l.vec()); }

  ProjMap inverse() const { return ProjMap(m_.inverse()); }
  ProjMap operator*(const ProjMap& rhs) const { return ProjMap(m_ * rhs.m_); }

  /// max entrywise distance between unit-Frobenius representatives, allowing
  /// a global sign flip.
  double distance(const ProjMap& other) const {
    const Eigen::Matrix3d a = m_ / m_.norm();
    const Eigen::Matrix3d b = other.m_ / other.m_.norm();
    return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
  }

 private:
  Eigen::Matrix3d m_;
};

inline HomPoint apply_point(const ProjMap& m, const HomPoint& p) { return m.apply(p); }
inline HomLine apply_line(const ProjMap& m, const HomLine& l) { return m.apply(l); }

namespace detail {

inline double triple(const HomPoint& a, const HomPoint& b, const HomPoint& c) {
  Eigen::Matrix3d m;
  m << a.unit(), b.unit(), c.unit();
  return m.determinant();
}

// Matrix sending the standard frame e1, e2, e3, (1,1,1) to the quadruple.
inline Eigen::Matrix3d frame_matrix(std::span<const HomPoint, 4> q) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        if (std::abs(triple(q[i], q[j], q[k])) <= 1e-10) {
          fail(Errc::DegenerateQuadruple, "three of the four points are collinear");
        }
      }
    }
  }
  Eigen::Matrix3d basis;
  basis << q[0].unit(), q[1].unit(), q[2].unit();
  const Eigen::Vector3d coeff = basis.partialPivLu().solve(q[3].unit());
  return basis * coeff.asDiagonal();
}

}  // namespace detail

/// The unique projective map sending src[i] to dst[i] for i = 0..3.
inline ProjMap map_from_correspondence(std::span<const HomPoint, 4> src,
                                       std::span<const HomPoint, 4> dst) {
  const Eigen::Matrix3d from = detail::frame_matrix(src);
  const Eigen::Matrix3d to = detail::frame_matrix(dst);
  Eigen::Matrix3d m = to * from.inverse();
  return ProjMap(m / m.norm());
}

inline double diameter(std::span<const Eigen::Vector2d> pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  }
  return d;
}

/// Closed polygon of n >= 3 affine vertices; vertex indices are taken mod n.
class Polygon {
 public:
  explicit Polygon(std::vector<HomPoint> vertices, double tol = kDefaultTol) {
    if (vertices.size() < 3) fail(Errc::InvalidPolygon, "a polygon needs at least 3 vertices");
    xy_.reserve(vertices.size());
    for (const auto& v : vertices) {
      auto a = v.affine();
      if (!a) fail(Errc::InvalidPolygon, "polygon vertices must be affine");
      xy_.push_back(*a);
    }
    const double diam = std::max(poncelet::diameter(xy_), 1e-300);
    for (std::size_t i = 0; i < xy_.size(); ++i) {
      if ((xy_[i] - xy_[(i + 1) % xy_.size()]).norm() <= tol * diam) {
        fail(Errc::InvalidPolygon, "consecutive vertices " + std::to_string(i) + " coincide");
      }
    }
  }

  static Polygon from_xy(std::span<const Eigen::Vector2d> xy, double tol = kDefaultTol) {
    std::vector<HomPoint> v;
    v.reserve(xy.size());
    for (const auto& p : xy) v.push_back(HomPoint::from_xy(p));
    return Polygon(std::move(v), tol);
  }

  std::size_t size() const noexcept { return xy_.size(); }

  std::size_t wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(xy_.size());
    return static_cast<std::size_t>(((i % n) + n) % n);
  }

  const Eigen::Vector2d& xy(std::ptrdiff_t i) const { return xy_[wrap(i)]; }
  HomPoint vertex(std::ptrdiff_t i) const { return HomPoint::from_xy(xy(i)); }
  std::vector<HomPoint> vertices() const {
    std::vector<HomPoint> out;
    out.reserve(xy_.size());
    for (const auto& p : xy_) out.push_back(HomPoint::from_xy(p));
    return out;
  }
  std::span<const Eigen::Vector2d> points() const noexcept { return xy_; }

  /// Line through vertex i and vertex i+1.
  HomLine side(std::ptrdiff_t i) const { return join(vertex(i), vertex(i + 1)); }

  double diameter() const { return poncelet::diameter(xy_); }

  Eigen::Vector2d centroid() const {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : xy_) c += p;
    return c / static_cast<double>(xy_.size());
  }

  /// Twice the signed area; positive for counterclockwise order.
  double signed_area2() const {
    double a = 0.0;
    for (std::size_t i = 0; i < xy_.size(); ++i) {
      const auto& p = xy_[i];
      const auto& q = xy_[(i + 1) % xy_.size()];
      a += p.x() * q.y() - p.y() * q.x();
    }
    return a;
  }

  bool is_convex() const {
    int sign = 0;
    for (std::size_t i = 0; i < xy_.size(); ++i) {
      const Eigen::Vector2d e1 = xy(static_cast<std::ptrdiff_t>(i) + 1) - xy_[i];
      const Eigen::Vector2d e2 = xy(static_cast<std::ptrdiff_t>(i) + 2) - xy(static_cast<std::ptrdiff_t>(i) + 1);
      const double c = e1.x() * e2.y() - e1.y() * e2.x();
      const int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
      if (s == 0) return false;
      if (sign == 0) sign = s;
      if (s != sign) return false;
    }
    // Rule out star polygons: total turning must be one full turn.
    double turn = 0.0;
    for (std::size_t i = 0; i < xy_.size(); ++i) {
      const Eigen::Vector2d e1 = xy(static_cast<std::ptrdiff_t>(i) + 1) - xy_[i];
      const Eigen::Vector2d e2 = xy(static_cast<std::ptrdiff_t>(i) + 2) - xy(static_cast<std::ptrdiff_t>(i) + 1);
      turn += std::atan2(e1.x() * e2.y() - e1.y() * e2.x(), e1.dot(e2));
    }
    return std::abs(std::abs(turn) - 2.0 * M_PI) < 1e-6;
  }

  Polygon transformed(const ProjMap& m) const {
    std::vector<HomPoint> v;
    v.reserve(xy_.size());
    for (std::size_t i = 0; i < xy_.size(); ++i) v.push_back(m.apply(vertex(static_cast<std::ptrdiff_t>(i))));
    return Polygon(std::move(v));
  }

 private:
  std::vector<Eigen::Vector2d> xy_;
};

/// Label correspondence between two cyclic point sequences: a[i] matches
/// b[shift + i] (or b[shift - i] when reversed).
struct CyclicAlignment {
  std::size_t shift = 0;
  bool reversed = false;
  double max_error = 0.0;  ///< relative to diameter of `a`
};

namespace detail {

inline double alignment_error(std::span<const Eigen::Vector2d> a, std::span<const Eigen::Vector2d> b,
                              std::size_t shift, bool reversed) {
  const std::size_t n = a.size();
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = reversed ? (shift + n - i) % n : (shift + i) % n;
    err = std::max(err, (a[i] - b[j]).norm());
  }
  return err;
}

}  // namespace detail

/// Alignment with the smallest error over all shifts and both orientations.
inline CyclicAlignment best_cyclic_alignment(std::span<const Eigen::Vector2d> a,
                                             std::span<const Eigen::Vector2d> b) {
  if (a.size() != b.size()) fail(Errc::SizeMismatch, "sequences differ in length");
  const double diam = std::max(diameter(a), 1e-300);
  CyclicAlignment best{0, false, std::numeric_limits<double>::infinity()};
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (bool rev : {false, true}) {
      const double e = detail::alignment_error(a, b, s, rev) / diam;
      if (e < best.max_error) best = {s, rev, e};
    }
  }
  return best;
}

/// Smallest shift (orientation-preserving first at equal shift) aligning the
/// two polygons within tol * diam(a).
inline std::optional<CyclicAlignment> cyclic_match(const Polygon& a, const Polygon& b, double tol) {
  if (a.size() != b.size()) fail(Errc::SizeMismatch, "polygons differ in vertex count");
  const double diam = a.diameter();
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (bool rev : {false, true}) {
      const double e = detail::alignment_error(a.points(), b.points(), s, rev) / diam;
      if (e < tol) return CyclicAlignment{s, rev, e};
    }
  }
  return std::nullopt;
}

}  // namespace poncelet
