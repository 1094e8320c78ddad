#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "poncelet/conics.hpp"
#include "poncelet/error.hpp"
#include "poncelet/grid.hpp"
#include "poncelet/poncelet.hpp"
#include "poncelet/projective.hpp"

namespace poncelet {

inline void check_diagonal_order(std::size_t n, int k) {
  if (n < 5) fail(Errc::BadK, "diagonal maps need n >= 5");
  if (k < 2 || 2 * k >= static_cast<int>(n)) {
    fail(Errc::BadK, "need 2 <= k < n/2, got k=" + std::to_string(k) + " for n=" + std::to_string(n));
  }
}

/// Line through vertex i and vertex i+k.
inline HomLine diagonal(const Polygon& p, std::ptrdiff_t i, int k) { return join(p.vertex(i), p.vertex(i + k)); }

/// D_k: vertex i is the meet of the k-diagonals starting at vertices i and i+1.
inline Polygon diagonal_polygon(const Polygon& p, int k) {
  check_diagonal_order(p.size(), k);
  std::vector<HomPoint> out;
  out.reserve(p.size());
  try {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const HomPoint v = meet(diagonal(p, ii, k), diagonal(p, ii + 1, k));
      if (v.is_ideal()) fail(Errc::DegenerateDiagonals, "consecutive diagonals are parallel");
      out.push_back(v);
    }
    return Polygon(std::move(out));
  } catch (const GeometryError& e) {
    if (e.code() == Errc::DegenerateDiagonals) throw;
    fail(Errc::DegenerateDiagonals, e.what());
  }
}

/// Conic tangent to every given line: exact through five well-spread lines,
/// then checked against all of them.
inline Conic inscribed_conic(const std::vector<HomLine>& lines, double tol = 1e-8) {
  const std::size_t n = lines.size();
  if (n < 5) fail(Errc::DegenerateInput, "an inscribed conic needs at least five tangent lines");
  std::array<HomLine, 5> pick{lines[0], lines[0], lines[0], lines[0], lines[0]};
  for (std::size_t j = 0; j < 5; ++j) pick[j] = lines[(j * n) / 5];
  const Conic c = conic_tangent_to_lines(pick);
  for (std::size_t i = 0; i < n; ++i) {
    if (c.dual_residual(lines[i]) > tol) {
      fail(Errc::NotCircumscribed, "line " + std::to_string(i) + " is not tangent to the fitted conic");
    }
  }
  return c;
}

/// I: tangency points of the sides with the inscribed conic, in side order.
/// Without a conic only pentagons are accepted (their inscribed conic is
/// determined by the five sides).
inline Polygon tangency_polygon(const Polygon& p, const std::optional<Conic>& inscribed = std::nullopt,
                                double tol = 1e-8) {
  std::vector<HomLine> sides;
  for (std::size_t i = 0; i < p.size(); ++i) sides.push_back(p.side(static_cast<std::ptrdiff_t>(i)));
  Conic c = Conic::circle(1.0);
  if (inscribed) {
    c = *inscribed;
  } else if (p.size() == 5) {
    c = conic_tangent_to_lines(std::span<const HomLine, 5>(sides.data(), 5));
  } else {
    fail(Errc::MissingConic, "an inscribed conic must be supplied for n > 5");
  }
  std::vector<HomPoint> out;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (c.dual_residual(sides[i]) > tol) {
      fail(Errc::NotCircumscribed, "side " + std::to_string(i) + " is not tangent to the inscribed conic");
    }
    out.push_back(HomPoint(c.adjugate() * sides[i].vec()));
  }
  return Polygon(std::move(out));
}

struct CommutationReport {
  std::size_t n = 0;
  int k = 0;
  double max_vertex_error = 0.0;  ///< relative to the diameter of I(D_k(P))
  std::size_t shift = 0;
  int orientation = 1;
  double tol = 0.0;
  bool passed = false;
};

/// Compares I(D_k(P)) with D_k(I(P)) for a polygon circumscribed about
/// `inscribed`. The inscribed conic of D_k(P) is the conic tangent to the
/// k-diagonals of P, which carry its sides.
inline CommutationReport commute_check(const Polygon& p, const Conic& inscribed, int k, double tol = 1e-8) {
  check_diagonal_order(p.size(), k);
  std::vector<HomLine> diagonals;
  for (std::size_t i = 0; i < p.size(); ++i) diagonals.push_back(diagonal(p, static_cast<std::ptrdiff_t>(i), k));
  const Conic diag_conic = inscribed_conic(diagonals);

  const Polygon id = tangency_polygon(diagonal_polygon(p, k), diag_conic);
  const Polygon di = diagonal_polygon(tangency_polygon(p, inscribed), k);

  CommutationReport r;
  r.n = p.size();
  r.k = k;
  r.tol = tol;
  const CyclicAlignment best = best_cyclic_alignment(id.points(), di.points());
  const auto hit = cyclic_match(id, di, tol);
  const CyclicAlignment a = hit ? *hit : best;
  r.max_vertex_error = a.max_error;
  r.shift = a.shift;
  r.orientation = a.reversed ? -1 : 1;
  r.passed = r.max_vertex_error < tol;
  return r;
}

inline CommutationReport commute_check(const PonceletPolygon& p, int k, double tol = 1e-8) {
  if (p.pair.winding != 1) fail(Errc::OutOfRange, "commutation is certified for winding-1 polygons only");
  return commute_check(p.polygon, p.pair.inner, k, tol);
}

/// A convex pentagon seen as a Poncelet polygon: conic through its vertices,
/// conic tangent to its sides.
inline PonceletPolygon as_poncelet_pentagon(const Polygon& p) {
  if (p.size() != 5) fail(Errc::SizeMismatch, "expected a pentagon");
  const auto verts = p.vertices();
  std::vector<HomLine> sides;
  for (std::ptrdiff_t i = 0; i < 5; ++i) sides.push_back(p.side(i));
  const Conic outer = conic_through_points(std::span<const HomPoint, 5>(verts.data(), 5));
  const Conic inner = conic_tangent_to_lines(std::span<const HomLine, 5>(sides.data(), 5));
  PonceletPolygon out{p, PonceletPair{outer, inner, 5, 1, 0.0, std::nullopt}, sides, {}, {0, 1, 2, 3, 4}};
  for (const auto& s : sides) out.tangency_points.push_back(HomPoint(inner.adjugate() * s.vec()).normalized());
  return out;
}

struct PencilRemarkReport {
  double rank_gap = 0.0;            ///< sigma_3 / sigma_1 of {outer, delta, Delta}
  int negative_rank = 0;            ///< numerical rank of {outer, inner, delta}
  double negative_gap = 0.0;        ///< sigma_3 / sigma_1 of {outer, inner, delta}
  std::optional<Conic> delta;       ///< conic through Q_k
  std::optional<Conic> big_delta;   ///< conic through the tangent meets L_i ∩ L_{i+k}
  double delta_fit_residual = 0.0;
  double big_delta_fit_residual = 0.0;
  double tol = 0.0;
  bool passed = false;
};

/// S = {L_i ∩ L_{i+k}} where L_i is the tangent to the outer conic at vertex i.
inline std::vector<HomPoint> outer_tangent_meets(const PonceletPolygon& p, int k) {
  std::vector<HomPoint> s;
  const auto n = static_cast<std::ptrdiff_t>(p.n());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const HomLine a = tangent_line_at(p.pair.outer, p.polygon.vertex(i), 1e-8);
    const HomLine b = tangent_line_at(p.pair.outer, p.polygon.vertex(i + k), 1e-8);
    s.push_back(meet(a, b));
  }
  return s;
}

/// The outer conic, the conic delta through Q_k and the conic Delta through
/// the meets of outer tangents L_i, L_{i+k} lie in one pencil; the confocal
/// triple {outer, inner, delta} does not.
inline PencilRemarkReport pencil_remark_check(const PonceletPolygon& p, int k, double tol = 1e-8) {
  if (p.pair.winding != 1) fail(Errc::OutOfRange, "the pencil check is certified for winding-1 polygons only");
  check_diagonal_order(p.n(), k);
  const PonceletGrid g = build_grid(p);
  const ConicFit delta = fit_conic(concentric_set(g, k));
  const ConicFit big_delta = fit_conic(outer_tangent_meets(p, k));

  PencilRemarkReport r;
  r.tol = tol;
  r.delta = delta.conic;
  r.big_delta = big_delta.conic;
  r.delta_fit_residual = delta.residual;
  r.big_delta_fit_residual = big_delta.residual;
  const std::array<Conic, 3> triple{p.pair.outer, delta.conic, big_delta.conic};
  r.rank_gap = pencil_gap(triple);
  const std::array<Conic, 3> control{p.pair.outer, p.pair.inner, delta.conic};
  const PencilRank cr = pencil_rank(control);
  r.negative_rank = cr.rank;
  r.negative_gap = cr.singular_ratios[2];
  r.passed = r.rank_gap < tol;
  return r;
}

enum class IterateOp { diagonal, tangency_then_diagonal };

struct IterationOrbit {
  std::vector<Polygon> polygons;
  std::vector<double> diameters;
  std::vector<Eigen::Vector2d> centroids;
  bool truncated = false;
  std::string stop_reason;
};

/// Orbit of D_k or of D_k ∘ I. The inscribed conic needed by I is rebuilt
/// from the sides at every step. Stops early on the first degeneracy.
inline IterationOrbit iterate_map(const Polygon& start, IterateOp op, int k, int steps) {
  IterationOrbit o;
  auto record = [&](const Polygon& p) {
    o.diameters.push_back(p.diameter());
    o.centroids.push_back(p.centroid());
    o.polygons.push_back(p);
  };
  record(start);
  for (int s = 0; s < steps; ++s) {
    try {
      const Polygon& cur = o.polygons.back();
      if (op == IterateOp::diagonal) {
        record(diagonal_polygon(cur, k));
      } else {
        std::vector<HomLine> sides;
        for (std::size_t i = 0; i < cur.size(); ++i) sides.push_back(cur.side(static_cast<std::ptrdiff_t>(i)));
        record(diagonal_polygon(tangency_polygon(cur, inscribed_conic(sides)), k));
      }
    } catch (const GeometryError& e) {
      o.truncated = true;
      o.stop_reason = e.what();
      break;
    }
  }
  return o;
}

}  // namespace poncelet
