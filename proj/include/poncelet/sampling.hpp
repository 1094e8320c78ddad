#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "poncelet/projective.hpp"

namespace poncelet {

/// Ellipse x = c + R(theta) (a cos t, b sin t).
struct EllipseShape {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double a = 1.0;
  double b = 1.0;
  double rotation = 0.0;

  Eigen::Vector2d at(double t) const {
    const Eigen::Vector2d local(a * std::cos(t), b * std::sin(t));
    return center + Eigen::Rotation2Dd(rotation) * local;
  }
};

/// Random ellipse with eccentricity at most `max_ecc`.
inline EllipseShape random_ellipse(std::mt19937_64& rng, double max_ecc = 0.9) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EllipseShape e;
  e.a = 0.5 + 1.5 * unit(rng);
  const double ecc = max_ecc * unit(rng);
  e.b = e.a * std::sqrt(1.0 - ecc * ecc);
  e.rotation = M_PI * unit(rng);
  e.center = Eigen::Vector2d(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
  return e;
}

/// Counterclockwise convex n-gon with vertices at sorted random parameters
/// on a random ellipse; consecutive parameters differ by at least `min_gap`.
inline Polygon random_convex_polygon(std::mt19937_64& rng, std::size_t n = 5, double max_ecc = 0.9,
                                     double min_gap = 0.15) {
  const EllipseShape e = random_ellipse(rng, max_ecc);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::vector<double> t(n);
  for (;;) {
    for (auto& x : t) x = angle(rng);
    std::sort(t.begin(), t.end());
    bool ok = (t.front() + 2.0 * M_PI - t.back()) >= min_gap;
    for (std::size_t i = 1; i < n && ok; ++i) ok = (t[i] - t[i - 1]) >= min_gap;
    if (ok) break;
  }
  std::vector<Eigen::Vector2d> pts;
  for (double x : t) pts.push_back(e.at(x));
  return Polygon::from_xy(pts);
}

/// Regular n-gon of circumradius r with vertex 0 at angle `phase`.
inline Polygon regular_polygon(std::size_t n, double r = 1.0, double phase = 0.0) {
  std::vector<Eigen::Vector2d> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = phase + 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    pts.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return Polygon::from_xy(pts);
}

}  // namespace poncelet
