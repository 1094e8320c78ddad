#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "poncelet/error.hpp"
#include "poncelet/projective.hpp"

namespace poncelet {

using Vector6d = Eigen::Matrix<double, 6, 1>;

enum class ConicClass { real_ellipse, hyperbola, parabola, degenerate, imaginary_ellipse };

constexpr std::string_view to_string(ConicClass c) {
  switch (c) {
    case ConicClass::real_ellipse: return "real_ellipse";
    case ConicClass::hyperbola: return "hyperbola";
    case ConicClass::parabola: return "parabola";
    case ConicClass::degenerate: return "degenerate";
    case ConicClass::imaginary_ellipse: return "imaginary_ellipse";
  }
  return "unknown";
}

/// Adjugate of a 3x3 matrix (transpose of the cofactor matrix).
inline Eigen::Matrix3d adjugate(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d a;
  a(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  a(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  a(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  a(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  a(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  a(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  a(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  a(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  a(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return a;
}

/// Conic A x^2 + B xy + C y^2 + D xw + E yw + F w^2 = 0 stored as its
/// symmetric matrix, normalized to unit Frobenius norm with the first
/// significant coefficient positive.
class Conic {
 public:
  explicit Conic(const Eigen::Matrix3d& m) {
    Eigen::Matrix3d s = 0.5 * (m + m.transpose());
    const double norm = s.norm();
    if (!s.allFinite() || norm == 0.0) fail(Errc::ZeroVector, "conic matrix must be finite and nonzero");
    m_ = s / norm;
    const Vector6d c = coefficients();
    const double big = c.cwiseAbs().maxCoeff();
    for (int i = 0; i < 6; ++i) {
      if (std::abs(c[i]) > 1e-12 * big) {
        if (c[i] < 0) m_ = -m_;
        break;
      }
    }
  }

  static Conic from_coefficients(const Vector6d& c) {
    Eigen::Matrix3d m;
    m << c[0], c[1] / 2, c[3] / 2,
         c[1] / 2, c[2], c[4] / 2,
         c[3] / 2, c[4] / 2, c[5];
    return Conic(m);
  }

  static Conic diagonal(double a, double b, double c) {
    return Conic(Eigen::Vector3d(a, b, c).asDiagonal().toDenseMatrix());
  }

  /// x^2 + y^2 = r^2 centered at the origin.
  static Conic circle(double r) { return diagonal(1.0, 1.0, -r * r); }

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }

  Vector6d coefficients() const {
    Vector6d c;
    c << m_(0, 0), 2 * m_(0, 1), m_(1, 1), 2 * m_(0, 2), 2 * m_(1, 2), m_(2, 2);
    return c;
  }

  double operator()(const HomPoint& p) const { return p.vec().dot(m_ * p.vec()); }

  /// Scale-free on-conic residual |p^T M p| for unit p and unit M.
  double residual(const HomPoint& p) const {
    const Eigen::Vector3d u = p.unit();
    return std::abs(u.dot(m_ * u));
  }

  Eigen::Matrix3d adjugate() const { return poncelet::adjugate(m_); }

  /// Scale-free tangency residual |l^T M* l| for unit l and unit M*.
  double dual_residual(const HomLine& l) const {
    const Eigen::Matrix3d a = adjugate();
    const double an = a.norm();
    if (an == 0.0) return 0.0;
    const Eigen::Vector3d u = l.unit();
    return std::abs(u.dot(a * u)) / an;
  }

  double determinant() const { return m_.determinant(); }

  /// Pole of the line at infinity; the center for central conics.
  HomPoint center() const { return HomPoint(adjugate() * Eigen::Vector3d(0, 0, 1)); }

  /// Image of the conic under the point map h.
  Conic transformed(const ProjMap& h) const {
    const Eigen::Matrix3d inv = h.matrix().inverse();
    return Conic(inv.transpose() * m_ * inv);
  }

  /// Distance between normalized coefficient vectors, up to sign.
  double distance(const Conic& other) const {
    const Vector6d a = coefficients().normalized();
    const Vector6d b = other.coefficients().normalized();
    return std::min((a - b).norm(), (a + b).norm());
  }

 private:
  Eigen::Matrix3d m_;
};

inline ConicClass classify(const Conic& c, double det_tol = 1e-10) {
  const Eigen::Matrix3d& m = c.matrix();
  const double det = m.determinant();
  if (std::abs(det) < det_tol) return ConicClass::degenerate;
  const double minor = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
  if (minor < -det_tol) return ConicClass::hyperbola;
  if (minor <= det_tol) return ConicClass::parabola;
  return det * (m(0, 0) + m(1, 1)) < 0 ? ConicClass::real_ellipse : ConicClass::imaginary_ellipse;
}

inline Conic dual(const Conic& c) {
  if (classify(c) == ConicClass::degenerate) fail(Errc::DegenerateConic, "degenerate conic has no dual");
  return Conic(c.adjugate());
}

/// Result of fitting a conic to a point set.
struct ConicFit {
  Conic conic;
  double residual = 0.0;  ///< sigma_min / sigma_max of the conditioned design matrix
};

namespace detail {

inline Vector6d veronese(const Eigen::Vector3d& p) {
  Vector6d r;
  r << p.x() * p.x(), p.x() * p.y(), p.y() * p.y(), p.x() * p.z(), p.y() * p.z(), p.z() * p.z();
  return r;
}

/// Similarity moving the affine centroid to the origin with RMS distance sqrt(2).
/// Identity when any point is ideal.
inline Eigen::Matrix3d isotropic_conditioning(std::span<const Eigen::Vector3d> pts) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) {
    if (std::abs(p.z()) <= kIdealEps * p.cwiseAbs().maxCoeff()) return Eigen::Matrix3d::Identity();
    c += p.head<2>() / p.z();
  }
  c /= static_cast<double>(pts.size());
  double ms = 0.0;
  for (const auto& p : pts) ms += (p.head<2>() / p.z() - c).squaredNorm();
  const double rms = std::sqrt(ms / static_cast<double>(pts.size()));
  if (rms == 0.0) return Eigen::Matrix3d::Identity();
  const double s = std::sqrt(2.0) / rms;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x(),
       0, s, -s * c.y(),
       0, 0, 1;
  return t;
}

struct Nullspace {
  Vector6d vector;
  double residual = 0.0;     // sigma_min / sigma_max (0 when fewer than 6 rows)
  double second_gap = 0.0;   // second-smallest singular value / sigma_max
};

inline Nullspace design_nullspace(std::span<const Eigen::Vector3d> rows_src) {
  const auto m = static_cast<Eigen::Index>(rows_src.size());
  Eigen::MatrixXd design(m, 6);
  for (Eigen::Index i = 0; i < m; ++i) {
    design.row(i) = veronese(rows_src[static_cast<std::size_t>(i)].normalized()).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Nullspace out;
  out.vector = svd.matrixV().col(5);
  const double top = s[0];
  out.residual = (m >= 6 && top > 0) ? s[5] / top : 0.0;
  out.second_gap = top > 0 ? s[4] / top : 0.0;
  return out;
}

// Conic through points with optional isotropic conditioning; returns the fit
// together with the rank diagnostics.
inline std::pair<ConicFit, double> conic_from_points(std::span<const HomPoint> points, double rank_tol) {
  if (points.size() < 5) fail(Errc::DegenerateInput, "at least 5 points are required");
  std::vector<Eigen::Vector3d> raw;
  raw.reserve(points.size());
  for (const auto& p : points) raw.push_back(p.vec());
  const Eigen::Matrix3d t = isotropic_conditioning(raw);
  std::vector<Eigen::Vector3d> cond;
  cond.reserve(raw.size());
  for (const auto& p : raw) cond.push_back(t * p);
  const Nullspace ns = design_nullspace(cond);
  if (ns.second_gap < rank_tol) {
    fail(Errc::DegenerateInput, "points do not determine a unique conic");
  }
  const Eigen::Matrix3d mc = Conic::from_coefficients(ns.vector).matrix();
  return {ConicFit{Conic(t.transpose() * mc * t), ns.residual}, ns.second_gap};
}

}  // namespace detail

/// Conic through five points (one-dimensional nullspace of the 5x6 design
/// matrix with rows (x^2, xy, y^2, xw, yw, w^2)).
inline Conic conic_through_points(std::span<const HomPoint, 5> points, double rank_tol = 1e-8) {
  return detail::conic_from_points(points, rank_tol).first.conic;
}

/// Total-least-squares conic through >= 5 points.
inline ConicFit fit_conic(std::span<const HomPoint> points, double rank_tol = 1e-8) {
  return detail::conic_from_points(points, rank_tol).first;
}

/// Conic tangent to five lines: the dual conic through the lines viewed as
/// points, then its adjugate.
inline Conic conic_tangent_to_lines(std::span<const HomLine, 5> lines, double rank_tol = 1e-8) {
  std::vector<Eigen::Vector3d> rows;
  rows.reserve(5);
  for (const auto& l : lines) rows.push_back(l.vec());
  const detail::Nullspace ns = detail::design_nullspace(rows);
  if (ns.second_gap < rank_tol) fail(Errc::DegenerateInput, "lines do not determine a unique conic");
  const Conic dual_conic = Conic::from_coefficients(ns.vector);
  if (classify(dual_conic) == ConicClass::degenerate) {
    fail(Errc::SingularDual, "dual conic through the lines is degenerate");
  }
  return Conic(dual_conic.adjugate());
}

/// Tangent line (polar) at a point of the conic.
inline HomLine tangent_line_at(const Conic& c, const HomPoint& p, double tol = kDefaultTol) {
  if (c.residual(p) > tol) fail(Errc::PointNotOnConic, "point is not on the conic");
  return HomLine(c.matrix() * p.vec()).normalized();
}

/// Point where a tangent line touches the conic (pole of the line).
inline HomPoint tangency_point(const Conic& c, const HomLine& l, double tol = kDefaultTol) {
  if (c.dual_residual(l) > tol) fail(Errc::LineNotTangent, "line is not tangent to the conic");
  return HomPoint(c.adjugate() * l.vec()).normalized();
}

/// Real intersections of a conic and a line.
struct LineIntersection {
  std::vector<HomPoint> points;  ///< 0, 1 (tangency) or 2 points
  double discriminant = 0.0;     ///< b^2 - ac of the restricted quadratic form
};

namespace detail {

// Orthonormal pair spanning the plane orthogonal to v.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> orthogonal_basis(const Eigen::Vector3d& v) {
  const Eigen::Vector3d u = v.normalized();
  Eigen::Index idx = 0;
  u.cwiseAbs().minCoeff(&idx);
  const Eigen::Vector3d axis = Eigen::Vector3d::Unit(idx);
  const Eigen::Vector3d e1 = u.cross(axis).normalized();
  const Eigen::Vector3d e2 = u.cross(e1);
  return {e1, e2};
}

// Roots of the quadratic form restricted to span{e1, e2}.
inline LineIntersection restricted_roots(const Eigen::Matrix3d& m, const Eigen::Vector3d& normal,
                                         double tangent_tol) {
  const auto [e1, e2] = orthogonal_basis(normal);
  const double a = e1.dot(m * e1);
  const double b = e1.dot(m * e2);
  const double c = e2.dot(m * e2);
  LineIntersection out;
  out.discriminant = b * b - a * c;
  if (out.discriminant < -tangent_tol) return out;
  if (out.discriminant <= tangent_tol) {
    // double root: (s, t) = (-b, a) or (c, -b), whichever is better conditioned
    const Eigen::Vector3d p = (std::abs(a) >= std::abs(c)) ? Eigen::Vector3d(-b * e1 + a * e2)
                                                           : Eigen::Vector3d(c * e1 - b * e2);
    out.points.push_back(HomPoint(p).normalized());
    return out;
  }
  const double sq = std::sqrt(out.discriminant);
  const double q = -(b + std::copysign(sq, b));
  out.points.push_back(HomPoint(q * e1 + a * e2).normalized());
  out.points.push_back(HomPoint(c * e1 + q * e2).normalized());
  return out;
}

}  // namespace detail

inline LineIntersection intersect_conic_line(const Conic& c, const HomLine& l, double tangent_tol = 1e-12) {
  if (classify(c) == ConicClass::degenerate) fail(Errc::DegenerateConic, "conic is degenerate");
  return detail::restricted_roots(c.matrix(), l.vec(), tangent_tol);
}

/// Numerical rank of a family of conics viewed as 6-vectors.
struct PencilRank {
  int rank = 0;
  double rank_gap = 0.0;                  ///< sigma_{rank+1} / sigma_1, 0 if full
  std::vector<double> singular_ratios;    ///< sigma_i / sigma_1
};

inline PencilRank pencil_rank(std::span<const Conic> conics, double threshold = 1e-8) {
  if (conics.size() < 2) fail(Errc::DegenerateInput, "pencil rank needs at least two conics");
  Eigen::MatrixXd stack(static_cast<Eigen::Index>(conics.size()), 6);
  for (std::size_t i = 0; i < conics.size(); ++i) {
    stack.row(static_cast<Eigen::Index>(i)) = conics[i].coefficients().normalized().transpose();
  }
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(stack).singularValues();
  PencilRank out;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out.singular_ratios.push_back(s[i] / s[0]);
    if (s[i] > threshold * s[0]) out.rank = static_cast<int>(i) + 1;
  }
  out.rank_gap = out.rank < s.size() ? out.singular_ratios[static_cast<std::size_t>(out.rank)] : 0.0;
  return out;
}

/// sigma_3 / sigma_1 of the stacked 6-vectors: zero exactly when all the
/// conics lie in one pencil.
inline double pencil_gap(std::span<const Conic> conics) {
  const PencilRank r = pencil_rank(conics);
  return r.singular_ratios.size() >= 3 ? r.singular_ratios[2] : 0.0;
}

}  // namespace poncelet
