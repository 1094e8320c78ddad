#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "poncelet/conics.hpp"
#include "poncelet/error.hpp"
#include "poncelet/projective.hpp"

namespace poncelet {

/// Confocal family x^2/(a2 + lambda) + y^2/(b2 + lambda) = 1 with a2 > b2 > 0.
/// Members are ellipses for lambda > -b2 and hyperbolas for -a2 < lambda < -b2.
class ConfocalFamily {
 public:
  ConfocalFamily(double a2, double b2) : a2_(a2), b2_(b2) {
    if (!(std::isfinite(a2) && std::isfinite(b2) && a2 > b2 && b2 > 0)) {
      fail(Errc::OutOfRange, "confocal family needs a2 > b2 > 0");
    }
  }

  double a2() const noexcept { return a2_; }
  double b2() const noexcept { return b2_; }

  bool is_ellipse_param(double lambda) const { return lambda > -b2_; }
  bool is_hyperbola_param(double lambda) const { return lambda > -a2_ && lambda < -b2_; }

  /// Half focal distance.
  double focal() const { return std::sqrt(a2_ - b2_); }

 private:
  double a2_;
  double b2_;
};

inline Conic conic_at(const ConfocalFamily& f, double lambda) {
  const double scale = f.a2() + f.b2();
  if (!(lambda > -f.a2()) || std::abs(lambda + f.b2()) <= 1e-14 * scale) {
    fail(Errc::OutOfRange, "lambda=" + std::to_string(lambda) + " outside the family");
  }
  return Conic::diagonal(1.0 / (f.a2() + lambda), 1.0 / (f.b2() + lambda), -1.0);
}

/// Diagonal map carrying the lambda-ellipse onto the mu-ellipse.
inline ProjMap transport_map(const ConfocalFamily& f, double lambda, double mu, int sign) {
  if (!f.is_ellipse_param(lambda) || !f.is_ellipse_param(mu)) {
    fail(Errc::OutOfRange, "transport maps are defined between family ellipses only");
  }
  const double s = sign >= 0 ? 1.0 : -1.0;
  return ProjMap::diagonal(s * std::sqrt((f.a2() + mu) / (f.a2() + lambda)),
                           s * std::sqrt((f.b2() + mu) / (f.b2() + lambda)), 1.0);
}

/// Family parameters of the members through an affine point, sorted
/// ascending. A generic point off the axes has one ellipse and one hyperbola
/// parameter; degenerate roots (lambda = -a2 or -b2) are dropped.
inline std::vector<double> params_through_point(const ConfocalFamily& f, const Eigen::Vector2d& p) {
  const double x2 = p.x() * p.x();
  const double y2 = p.y() * p.y();
  if (x2 + y2 == 0.0) fail(Errc::NoRealRoot, "the center lies on no family member");
  // lambda^2 + bq lambda + cq = 0
  const double bq = f.a2() + f.b2() - x2 - y2;
  const double cq = f.a2() * f.b2() - x2 * f.b2() - y2 * f.a2();
  const double disc = bq * bq - 4.0 * cq;
  if (disc < 0) fail(Errc::NoRealRoot, "no real family member through the point");
  const double q = -0.5 * (bq + std::copysign(std::sqrt(disc), bq));
  std::vector<double> roots;
  const double scale = f.a2() + f.b2() + x2 + y2;
  auto keep = [&](double r) {
    if (!std::isfinite(r)) return;
    if (!(r > -f.a2()) || std::abs(r + f.a2()) <= 1e-13 * scale) return;
    if (std::abs(r + f.b2()) <= 1e-13 * scale) return;
    roots.push_back(r);
  };
  keep(q);
  if (q != 0.0) keep(cq / q);
  std::sort(roots.begin(), roots.end());
  if (roots.size() == 2 && roots[0] == roots[1]) roots.pop_back();
  if (roots.empty()) fail(Errc::NoRealRoot, "point lies only on degenerate family members");
  return roots;
}

/// Ellipse parameter of a point (the root > -b2).
inline double ellipse_param(const ConfocalFamily& f, const Eigen::Vector2d& p) {
  for (double r : params_through_point(f, p)) {
    if (f.is_ellipse_param(r)) return r;
  }
  fail(Errc::NoRealRoot, "no family ellipse through the point");
}

/// Hyperbola parameter of a point (the root in (-a2, -b2)).
inline double hyperbola_param(const ConfocalFamily& f, const Eigen::Vector2d& p) {
  for (double r : params_through_point(f, p)) {
    if (f.is_hyperbola_param(r)) return r;
  }
  fail(Errc::NoRealRoot, "no family hyperbola through the point");
}

}  // namespace poncelet
