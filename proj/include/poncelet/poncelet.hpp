#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "poncelet/confocal.hpp"
#include "poncelet/conics.hpp"
#include "poncelet/error.hpp"
#include "poncelet/projective.hpp"

namespace poncelet {

/// The two tangent lines from a point to a conic. For a point on the conic
/// the tangent there is returned twice.
struct TangentPair {
  std::array<HomLine, 2> lines;
  bool on_conic = false;
};

/// Tangent lines through p: the points of the dual conic on the dual line p.
inline TangentPair tangent_lines_from(const Conic& c, const HomPoint& p, double tangent_tol = 1e-12) {
  const Eigen::Matrix3d adj = c.adjugate();
  const LineIntersection roots = detail::restricted_roots(adj / adj.norm(), p.vec(), tangent_tol);
  if (roots.points.empty()) fail(Errc::PointInsideConic, "no real tangent lines from an interior point");
  const HomLine first(roots.points.front().vec());
  if (roots.points.size() == 1) return {{first.normalized(), first.normalized()}, true};
  return {{first.normalized(), HomLine(roots.points.back().vec()).normalized()}, false};
}

/// Point of an ellipse in direction `angle` from its center.
inline HomPoint ellipse_point(const Conic& c, double angle) {
  const Eigen::Vector2d center = c.center().xy();
  const Eigen::Vector2d d(std::cos(angle), std::sin(angle));
  const Eigen::Matrix3d& m = c.matrix();
  const Eigen::Matrix2d m2 = m.topLeftCorner<2, 2>();
  const Eigen::Vector2d lin = m.topRightCorner<2, 1>();
  const double qa = d.dot(m2 * d);
  const double qb = d.dot(m2 * center + lin);
  const double qc = center.dot(m2 * center) + 2.0 * lin.dot(center) + m(2, 2);
  const double disc = qb * qb - qa * qc;
  if (disc <= 0 || qa == 0) fail(Errc::DegenerateConic, "ray from the center misses the conic");
  const double t1 = (-qb + std::sqrt(disc)) / qa;
  const double t2 = (-qb - std::sqrt(disc)) / qa;
  return HomPoint::from_xy(center + std::max(t1, t2) * d);
}

/// True when every point of `inner` lies strictly inside the real ellipse `outer`.
inline bool is_nested(const Conic& outer, const Conic& inner, int samples = 128) {
  if (classify(outer) != ConicClass::real_ellipse || classify(inner) != ConicClass::real_ellipse) return false;
  const double inside_sign = outer(outer.center()) < 0 ? -1.0 : 1.0;
  for (int i = 0; i < samples; ++i) {
    const HomPoint p = ellipse_point(inner, 2.0 * M_PI * i / samples);
    if (inside_sign * outer(HomPoint(p.unit())) <= 0) return false;
  }
  return true;
}

/// Where a Poncelet pair sits in a confocal family, when it was found there.
struct ConfocalPlacement {
  ConfocalFamily family;
  double lambda_outer;
  double lambda_inner;
};

/// Outer conic (vertices) and inner conic (sides) supporting a closed
/// n-gon that winds `winding` times around the inner conic.
struct PonceletPair {
  Conic outer;
  Conic inner;
  int n = 0;
  int winding = 1;
  double closure_error = 0.0;
  std::optional<ConfocalPlacement> confocal;
};

inline void validate_pair_shape(int n, int winding) {
  if (n < 3) fail(Errc::OutOfRange, "n must be at least 3");
  if (winding < 1 || std::gcd(n, winding) != 1 || 2 * winding >= n) {
    fail(Errc::OutOfRange, "winding must be coprime to n with winding/n < 1/2");
  }
}

/// Concentric circles R = 1, r = cos(pi winding / n): the regular n-gon pair.
inline PonceletPair regular_pair(int n, int winding = 1) {
  validate_pair_shape(n, winding);
  return {Conic::circle(1.0), Conic::circle(std::cos(M_PI * winding / n)), n, winding, 0.0, std::nullopt};
}

struct ChordStep {
  HomPoint next;
  HomLine side;
  HomPoint touch;  ///< tangency point of `side` with the inner conic
};

/// One Poncelet step: the tangent from p to `inner` whose tangency point lies
/// on the `orientation` side (+1 counterclockwise) as seen from the inner
/// center, continued to its second intersection with `outer`.
inline ChordStep chord_step(const Conic& outer, const Conic& inner, const HomPoint& p, int orientation = 1,
                            double tol = kDefaultTol) {
  if (outer.residual(p) > tol) fail(Errc::PointNotOnConic, "chord step must start on the outer conic");
  const Eigen::Vector2d c = inner.center().xy();
  const Eigen::Vector2d pa = p.xy();
  const TangentPair tp = tangent_lines_from(inner, p);
  const Eigen::Matrix3d adj = inner.adjugate();
  std::array<Eigen::Vector2d, 2> touch;
  for (int i = 0; i < 2; ++i) touch[i] = HomPoint(adj * tp.lines[i].vec()).xy();
  const double scale = std::max((pa - c).norm(), 1e-300);
  if (tp.on_conic || (touch[0] - touch[1]).norm() <= 1e-12 * scale) {
    fail(Errc::AmbiguousOrientation, "tangency points are not separated");
  }
  auto side_of = [&](const Eigen::Vector2d& t) {
    const Eigen::Vector2d u = pa - c;
    const Eigen::Vector2d v = t - c;
    return u.x() * v.y() - u.y() * v.x();
  };
  const double want = orientation >= 0 ? 1.0 : -1.0;
  const double s0 = side_of(touch[0]) * want;
  const double s1 = side_of(touch[1]) * want;
  if ((s0 > 0) == (s1 > 0)) fail(Errc::AmbiguousOrientation, "both tangency points on one side");
  const int pick = s0 > 0 ? 0 : 1;
  const HomLine side = tp.lines[static_cast<std::size_t>(pick)];
  const LineIntersection hits = intersect_conic_line(outer, side);
  if (hits.points.size() != 2) fail(Errc::AmbiguousOrientation, "side line does not cross the outer conic");
  const auto far = [&](const HomPoint& h) { return (h.xy() - pa).norm(); };
  const HomPoint next = far(hits.points[0]) >= far(hits.points[1]) ? hits.points[0] : hits.points[1];
  return {next, side, HomPoint::from_xy(touch[static_cast<std::size_t>(pick)])};
}

namespace detail {

inline double polar_angle(const Eigen::Vector2d& center, const Eigen::Vector2d& p) {
  return std::atan2(p.y() - center.y(), p.x() - center.x());
}

// Advance in (-pi, pi] mapped into [0, 2 pi) for ccw motion.
inline double ccw_advance(double from, double to) {
  double d = std::fmod(to - from, 2.0 * M_PI);
  if (d < 0) d += 2.0 * M_PI;
  return d;
}

struct Orbit {
  std::vector<HomPoint> vertices;  // n + 1 points, last one is the return point
  std::vector<ChordStep> steps;
  double total_advance = 0.0;      // unwrapped polar angle about the outer center
};

inline Orbit orbit(const Conic& outer, const Conic& inner, const HomPoint& start, int steps) {
  Orbit o;
  const Eigen::Vector2d c = outer.center().xy();
  o.vertices.push_back(start);
  for (int i = 0; i < steps; ++i) {
    const ChordStep s = chord_step(outer, inner, o.vertices.back(), 1);
    o.total_advance += ccw_advance(polar_angle(c, o.vertices.back().xy()), polar_angle(c, s.next.xy()));
    o.vertices.push_back(s.next);
    o.steps.push_back(s);
  }
  return o;
}

inline double closure_of(const Orbit& o) {
  std::vector<Eigen::Vector2d> pts;
  for (std::size_t i = 0; i + 1 < o.vertices.size(); ++i) pts.push_back(o.vertices[i].xy());
  const double diam = std::max(diameter(pts), 1e-300);
  return (o.vertices.back().xy() - o.vertices.front().xy()).norm() / diam;
}

}  // namespace detail

/// Average counterclockwise advance per chord step, in turns.
inline double rotation_number(const Conic& outer, const Conic& inner, const HomPoint& p0, int steps) {
  if (steps < 1) fail(Errc::OutOfRange, "rotation number needs at least one step");
  const detail::Orbit o = detail::orbit(outer, inner, p0, steps);
  return o.total_advance / (2.0 * M_PI * steps);
}

/// Relative distance between the start and the n-th chord-step iterate.
inline double closure_error(const PonceletPair& pair, const HomPoint& start) {
  return detail::closure_of(detail::orbit(pair.outer, pair.inner, start, pair.n));
}

/// Bisection over the inner family parameter until the n-gon closes after
/// `winding` turns. Works on the unwrapped angle defect, which is decreasing
/// in the inner parameter and vanishes exactly at closure.
inline PonceletPair find_closing_inner(const ConfocalFamily& f, double lambda_outer, int n, int winding,
                                       double tol = 1e-12, int max_iter = 200) {
  if (n < 5) fail(Errc::OutOfRange, "n must be at least 5");
  validate_pair_shape(n, winding);
  if (!f.is_ellipse_param(lambda_outer)) fail(Errc::OutOfRange, "outer parameter must give an ellipse");
  const Conic outer = conic_at(f, lambda_outer);
  const HomPoint start = HomPoint::from_xy({std::sqrt(f.a2() + lambda_outer), 0.0});
  const double target = 2.0 * M_PI * winding;

  struct Probe {
    double defect;
    double closure;
  };
  auto probe = [&](double lambda_inner) {
    const detail::Orbit o = detail::orbit(outer, conic_at(f, lambda_inner), start, n);
    return Probe{o.total_advance - target, detail::closure_of(o)};
  };

  const double width = lambda_outer + f.b2();
  double lo = -f.b2() + 1e-9 * width;
  double hi = lambda_outer - 1e-9 * width;
  const Probe plo = probe(lo);
  const Probe phi = probe(hi);
  if (!(plo.defect > 0 && phi.defect < 0)) {
    fail(Errc::BracketFailure, "rotation number " + std::to_string(winding) + "/" + std::to_string(n) +
                                   " is not attained in the inner range");
  }

  double best_lambda = lo;
  double best_closure = plo.closure;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Probe pm = probe(mid);
    if (pm.closure < best_closure) {
      best_closure = pm.closure;
      best_lambda = mid;
    }
    if (pm.closure < tol) break;
    if (pm.defect > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(best_closure < tol)) {
    fail(Errc::NoConvergence, "closure error " + std::to_string(best_closure) + " above tolerance");
  }
  return {outer, conic_at(f, best_lambda), n, winding, best_closure,
          ConfocalPlacement{f, lambda_outer, best_lambda}};
}

/// A closed Poncelet polygon with its side lines and tangency points.
/// side_lines / tangency_points are ordered counterclockwise around the inner
/// conic starting from side 0; side_order[j] is the traversal index of the
/// side in position j (side i joins vertex i and vertex i+1).
struct PonceletPolygon {
  Polygon polygon;
  PonceletPair pair;
  std::vector<HomLine> side_lines;
  std::vector<HomPoint> tangency_points;
  std::vector<std::size_t> side_order;

  std::size_t n() const { return polygon.size(); }
};

/// Checks the on-conic, tangency and cyclic-order invariants; throws on the
/// first violation.
inline void validate(const PonceletPolygon& p, double tol = 1e-8) {
  const std::size_t n = p.n();
  if (p.side_lines.size() != n || p.tangency_points.size() != n || p.side_order.size() != n) {
    fail(Errc::SizeMismatch, "Poncelet polygon parts disagree in size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (p.pair.outer.residual(p.polygon.vertex(static_cast<std::ptrdiff_t>(i))) > tol) {
      fail(Errc::PointNotOnConic, "vertex " + std::to_string(i) + " is off the outer conic");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto& l = p.side_lines[j];
    const auto& t = p.tangency_points[j];
    const auto i = static_cast<std::ptrdiff_t>(p.side_order[j]);
    if (p.pair.inner.dual_residual(l) > tol) fail(Errc::LineNotTangent, "side " + std::to_string(j) + " not tangent");
    if (incidence(l, p.polygon.vertex(i)) > tol || incidence(l, p.polygon.vertex(i + 1)) > tol) {
      fail(Errc::InvalidPolygon, "side " + std::to_string(j) + " misses its vertices");
    }
    if (incidence(l, t) > tol || p.pair.inner.residual(t) > tol) {
      fail(Errc::InvalidPolygon, "tangency point " + std::to_string(j) + " misplaced");
    }
  }
  // counterclockwise order of tangency points around the inner center
  const Eigen::Vector2d c = p.pair.inner.center().xy();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total += detail::ccw_advance(detail::polar_angle(c, p.tangency_points[j].xy()),
                                 detail::polar_angle(c, p.tangency_points[(j + 1) % n].xy()));
  }
  if (std::abs(total - 2.0 * M_PI) > 1e-6) fail(Errc::InvalidPolygon, "tangency points out of cyclic order");
}

/// n counterclockwise chord steps from p0.
inline PonceletPolygon build_polygon(const PonceletPair& pair, const HomPoint& p0, double tol = 1e-7) {
  validate_pair_shape(pair.n, pair.winding);
  const detail::Orbit o = detail::orbit(pair.outer, pair.inner, p0, pair.n);
  const double err = detail::closure_of(o);
  if (!(err <= tol)) fail(Errc::ClosureFailure, "polygon misses its start by " + std::to_string(err));

  const auto n = static_cast<std::size_t>(pair.n);
  std::vector<HomPoint> verts(o.vertices.begin(), o.vertices.begin() + pair.n);
  Polygon poly(std::move(verts));

  const Eigen::Vector2d c = pair.inner.center().xy();
  const double a0 = detail::polar_angle(c, o.steps[0].touch.xy());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = detail::ccw_advance(a0, detail::polar_angle(c, o.steps[i].touch.xy()));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key[x] < key[y]; });

  PonceletPolygon out{std::move(poly), pair, {}, {}, order};
  out.pair.closure_error = err;
  for (std::size_t j : order) {
    out.side_lines.push_back(o.steps[j].side);
    out.tangency_points.push_back(tangency_point(pair.inner, o.steps[j].side, 1e-8));
  }
  validate(out, std::max(1e-8, 10 * tol));
  return out;
}

/// Image of a Poncelet polygon under a projective map. Orientation and
/// ordering are carried along; the confocal placement is dropped.
inline PonceletPolygon transformed(const PonceletPolygon& p, const ProjMap& m) {
  PonceletPair pair{p.pair.outer.transformed(m), p.pair.inner.transformed(m), p.pair.n, p.pair.winding,
                    p.pair.closure_error, std::nullopt};
  PonceletPolygon out{p.polygon.transformed(m), pair, {}, {}, p.side_order};
  for (const auto& l : p.side_lines) out.side_lines.push_back(m.apply(l).normalized());
  for (const auto& t : p.tangency_points) out.tangency_points.push_back(m.apply(t).normalized());
  return out;
}

/// Polygon from a confocal closure search started at the given polar angle.
inline PonceletPolygon confocal_poncelet_polygon(const ConfocalFamily& f, double lambda_outer, int n, int winding,
                                                 double start_angle = 0.4, double tol = 1e-12) {
  const PonceletPair pair = find_closing_inner(f, lambda_outer, n, winding, tol);
  return build_polygon(pair, ellipse_point(pair.outer, start_angle));
}

struct PorismResult {
  double max_error = 0.0;
  std::vector<double> errors;  ///< per sample, in sampling order
};

/// Closure error from `samples` random starting points on the outer conic.
inline PorismResult porism_check(const PonceletPair& pair, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  PorismResult r;
  for (int i = 0; i < samples; ++i) {
    const double e = closure_error(pair, ellipse_point(pair.outer, angle(rng)));
    r.errors.push_back(e);
    r.max_error = std::max(r.max_error, e);
  }
  return r;
}

}  // namespace poncelet
