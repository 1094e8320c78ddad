#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "poncelet/confocal.hpp"
#include "poncelet/conics.hpp"
#include "poncelet/error.hpp"
#include "poncelet/poncelet.hpp"
#include "poncelet/projective.hpp"

namespace poncelet {

/// The n(n+1)/2 pairwise intersections of the side lines of a Poncelet
/// n-gon (n odd); the "self-intersection" of a line is its tangency point.
class PonceletGrid {
 public:
  PonceletGrid(std::vector<HomLine> lines, std::vector<HomPoint> points, Conic inner, Conic outer,
               std::optional<ConfocalPlacement> confocal = std::nullopt)
      : lines_(std::move(lines)),
        points_(std::move(points)),
        inner_(std::move(inner)),
        outer_(std::move(outer)),
        confocal_(std::move(confocal)) {
    const auto n = lines_.size();
    if (n % 2 == 0) fail(Errc::EvenN, "Poncelet grids are built for odd n only");
    if (points_.size() != n * (n + 1) / 2) fail(Errc::SizeMismatch, "grid needs n(n+1)/2 points");
  }

  int n() const noexcept { return static_cast<int>(lines_.size()); }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<HomLine>& lines() const noexcept { return lines_; }
  const HomLine& line(int i) const { return lines_[wrap(i)]; }
  const Conic& inner() const noexcept { return inner_; }
  const Conic& outer() const noexcept { return outer_; }
  const std::optional<ConfocalPlacement>& confocal() const noexcept { return confocal_; }
  const std::vector<HomPoint>& points() const noexcept { return points_; }

  /// Point l_i ∩ l_j, indices mod n.
  const HomPoint& point(int i, int j) const { return points_[index(i, j)]; }

  std::size_t ideal_count() const {
    return static_cast<std::size_t>(std::count_if(points_.begin(), points_.end(),
                                                  [](const HomPoint& p) { return p.is_ideal(); }));
  }

  PonceletGrid transformed(const ProjMap& m) const {
    std::vector<HomLine> lines;
    std::vector<HomPoint> pts;
    for (const auto& l : lines_) lines.push_back(m.apply(l).normalized());
    for (const auto& p : points_) pts.push_back(m.apply(p).normalized());
    return {std::move(lines), std::move(pts), inner_.transformed(m), outer_.transformed(m)};
  }

  std::size_t wrap(int i) const {
    const int n = this->n();
    return static_cast<std::size_t>(((i % n) + n) % n);
  }

  /// Storage slot of the unordered pair {i, j}.
  std::size_t index(int i, int j) const {
    std::size_t a = wrap(i);
    std::size_t b = wrap(j);
    if (a > b) std::swap(a, b);
    const auto n = lines_.size();
    return a * n - a * (a - 1) / 2 + (b - a);
  }

 private:
  std::vector<HomLine> lines_;
  std::vector<HomPoint> points_;
  Conic inner_;
  Conic outer_;
  std::optional<ConfocalPlacement> confocal_;
};

inline PonceletGrid build_grid(const PonceletPolygon& poly) {
  const auto n = poly.n();
  if (n % 2 == 0) fail(Errc::EvenN, "Poncelet grids are built for odd n only");
  std::vector<HomPoint> pts;
  pts.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (i == j) {
        pts.push_back(poly.tangency_points[i]);
        continue;
      }
      try {
        pts.push_back(meet(poly.side_lines[i], poly.side_lines[j]));
      } catch (const GeometryError&) {
        fail(Errc::NearParallelLines, "side lines " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
  return {poly.side_lines, std::move(pts), poly.pair.inner, poly.pair.outer, poly.pair.confocal};
}

/// Q_k: the n points l_m ∩ l_{m+k}, m = 0..n-1.
inline std::vector<HomPoint> concentric_set(const PonceletGrid& g, int k) {
  if (k < 0 || 2 * k > g.n() - 1) fail(Errc::IndexOutOfRange, "concentric index out of range");
  std::vector<HomPoint> out;
  for (int m = 0; m < g.n(); ++m) out.push_back(g.point(m, m + k));
  return out;
}

/// R_k: the (n+1)/2 points l_i ∩ l_j with i + j = k (mod n), ordered outward
/// from the tangency point on the diagonal.
inline std::vector<HomPoint> radial_set(const PonceletGrid& g, int k) {
  if (k < 0 || k >= g.n()) fail(Errc::IndexOutOfRange, "radial index out of range");
  const int n = g.n();
  const int center = (k * ((n + 1) / 2)) % n;  // 2 * center = k mod n
  std::vector<HomPoint> out;
  for (int d = 0; d <= (n - 1) / 2; ++d) out.push_back(g.point(center + d, center - d));
  return out;
}

struct GridTolerances {
  double fit = 1e-9;          ///< Q-set fit residual
  double pencil = 1e-8;       ///< sigma_3 / sigma_1 of the dual conics
  double equivalence = 1e-7;  ///< projective equivalence match error
};

struct SetFit {
  int index = 0;
  std::size_t points = 0;
  ConicClass cls = ConicClass::degenerate;
  double residual = 0.0;
  std::optional<Conic> conic;
  ConicClass expected = ConicClass::real_ellipse;
  std::string method;  ///< "tls", "exact", "dual-pencil" or "skipped-ideal"
  bool passed = false;
};

struct EquivalenceEntry {
  int i = 0;
  int j = 0;
  double error = 0.0;
  std::size_t shift = 0;
  bool reversed = false;
  bool passed = false;
};

/// Outcome of the three parts of the grid theorem. Every pass flag is taken
/// against the tolerance stored alongside it.
struct GridReport {
  int n = 0;
  GridTolerances tol;
  std::size_t point_count = 0;
  std::size_t ideal_points = 0;
  std::vector<SetFit> concentric;
  std::vector<SetFit> radial;
  double q0_inner_distance = 0.0;
  double dual_pencil_gap = 0.0;
  int dual_pencil_rank = 0;
  std::size_t dual_pencil_size = 0;
  std::vector<EquivalenceEntry> concentric_equivalence;
  std::vector<EquivalenceEntry> radial_equivalence;
  bool conics_ok = false;       // part (i)
  bool tangents_ok = false;     // part (ii)
  bool equivalence_ok = false;  // part (iii)
  bool passed = false;
};

namespace detail {

inline bool any_ideal(const std::vector<HomPoint>& pts) {
  return std::any_of(pts.begin(), pts.end(), [](const HomPoint& p) { return p.is_ideal(); });
}

inline std::vector<Eigen::Vector2d> affine_points(const std::vector<HomPoint>& pts) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.xy());
  return out;
}

// Member of the dual pencil span{d0, d1} through pts[0] that best fits the
// remaining points; the dual pencil is parameterized homogeneously by (s, t).
inline std::pair<Conic, double> dual_pencil_member(const Eigen::Matrix3d& d0, const Eigen::Matrix3d& d1,
                                                   const std::vector<HomPoint>& pts) {
  const Eigen::Matrix3d a0 = adjugate(d0);
  const Eigen::Matrix3d a1 = adjugate(d1);
  const Eigen::Matrix3d mix = adjugate(d0 + d1) - a0 - a1;
  const Eigen::Vector3d p = pts.front().unit();
  // p^T adj(s d0 + t d1) p = qa s^2 + qb s t + qc t^2
  const double qa = p.dot(a0 * p);
  const double qb = p.dot(mix * p);
  const double qc = p.dot(a1 * p);
  Eigen::Matrix3d sym;
  sym << qa, qb / 2, 0, qb / 2, qc, 0, 0, 0, 1;
  const LineIntersection roots = restricted_roots(sym, Eigen::Vector3d(0, 0, 1), 0.0);
  if (roots.points.empty()) fail(Errc::FitFailure, "no dual pencil member through the radial set");
  std::optional<Conic> best;
  double best_res = std::numeric_limits<double>::infinity();
  for (const auto& r : roots.points) {
    const Conic c(adjugate(r[0] * d0 + r[1] * d1));
    double res = 0.0;
    for (const auto& q : pts) res = std::max(res, c.residual(q));
    if (res < best_res) {
      best_res = res;
      best = c;
    }
  }
  return {*best, best_res};
}

inline SetFit fit_set(int index, const std::vector<HomPoint>& pts, ConicClass expected, double tol) {
  SetFit f;
  f.index = index;
  f.points = pts.size();
  f.expected = expected;
  if (any_ideal(pts)) {
    f.method = "skipped-ideal";
    f.passed = true;
    return f;
  }
  try {
    const ConicFit fit = fit_conic(pts);
    f.conic = fit.conic;
    f.residual = fit.residual;
    f.cls = classify(fit.conic);
    f.method = pts.size() > 5 ? "tls" : "exact";
  } catch (const GeometryError& e) {
    fail(Errc::FitFailure, "set " + std::to_string(index) + ": " + e.what());
  }
  f.passed = f.residual < tol && f.cls == expected;
  return f;
}

inline EquivalenceEntry projective_match(int i, int j, const std::vector<HomPoint>& a, const std::vector<HomPoint>& b,
                                         double tol) {
  EquivalenceEntry e{i, j, std::numeric_limits<double>::infinity(), 0, false, false};
  const std::size_t m = a.size();
  if (m < 5 || any_ideal(a) || any_ideal(b)) {
    e.error = 0.0;
    e.passed = true;
    return e;
  }
  const auto bxy = affine_points(b);
  const double diam = std::max(diameter(bxy), 1e-300);
  const std::array<std::size_t, 4> ref{0, m / 4, m / 2, (3 * m) / 4};
  std::array<std::size_t, 4> pick = ref;
  for (std::size_t r = 1; r < 4; ++r) pick[r] = std::max(pick[r], pick[r - 1] + 1);
  for (std::size_t s = 0; s < m; ++s) {
    for (bool rev : {false, true}) {
      auto partner = [&](std::size_t idx) { return rev ? (s + m - idx) % m : (s + idx) % m; };
      const std::array<HomPoint, 4> src{a[pick[0]], a[pick[1]], a[pick[2]], a[pick[3]]};
      const std::array<HomPoint, 4> dst{b[partner(pick[0])], b[partner(pick[1])], b[partner(pick[2])],
                                        b[partner(pick[3])]};
      try {
        const ProjMap h = map_from_correspondence(src, dst);
        double err = 0.0;
        for (std::size_t idx = 0; idx < m; ++idx) {
          const HomPoint img = h.apply(a[idx]);
          err = img.is_ideal() ? std::numeric_limits<double>::infinity()
                               : std::max(err, (img.xy() - bxy[partner(idx)]).norm() / diam);
        }
        if (err < e.error) {
          e.error = err;
          e.shift = s;
          e.reversed = rev;
        }
      } catch (const GeometryError&) {
        continue;
      }
    }
  }
  e.passed = e.error < tol;
  return e;
}

}  // namespace detail

/// Checks (i) conic fits of concentric/radial sets, (ii) the four common
/// tangents as a rank-2 dual pencil, (iii) pairwise projective equivalence.
inline GridReport verify_grid_theorem(const PonceletGrid& g, const GridTolerances& tol = {}) {
  GridReport r;
  r.n = g.n();
  r.tol = tol;
  r.point_count = g.size();
  r.ideal_points = g.ideal_count();
  const int n = g.n();
  const int half = (n - 1) / 2;

  std::vector<std::vector<HomPoint>> qsets;
  std::vector<std::vector<HomPoint>> rsets;
  for (int k = 0; k <= half; ++k) qsets.push_back(concentric_set(g, k));
  for (int k = 0; k < n; ++k) rsets.push_back(radial_set(g, k));

  for (int k = 0; k <= half; ++k) {
    r.concentric.push_back(detail::fit_set(k, qsets[static_cast<std::size_t>(k)], ConicClass::real_ellipse, tol.fit));
  }
  if (r.concentric.front().conic) r.q0_inner_distance = r.concentric.front().conic->distance(g.inner());

  std::vector<Conic> duals;
  for (const auto& f : r.concentric) {
    if (f.conic) duals.push_back(dual(*f.conic));
  }
  for (int k = 0; k < n; ++k) {
    const auto& pts = rsets[static_cast<std::size_t>(k)];
    if (pts.size() >= 5) {
      // A radial set of five points is fitted exactly; its residual is zero by
      // construction, so only the classification is meaningful.
      r.radial.push_back(detail::fit_set(k, pts, ConicClass::hyperbola, 1.0));
      if (r.radial.back().conic) duals.push_back(dual(*r.radial.back().conic));
      continue;
    }
    SetFit f;
    f.index = k;
    f.points = pts.size();
    f.expected = ConicClass::hyperbola;
    if (detail::any_ideal(pts) || duals.size() < 2 || !r.concentric[0].conic || !r.concentric[1].conic) {
      f.method = "skipped-ideal";
      f.passed = true;
    } else {
      const auto [c, res] = detail::dual_pencil_member(r.concentric[0].conic->adjugate(),
                                                       r.concentric[1].conic->adjugate(), pts);
      f.conic = c;
      f.residual = res;
      f.cls = classify(c);
      f.method = "dual-pencil";
      f.passed = f.cls == ConicClass::hyperbola && res < tol.equivalence;
    }
    r.radial.push_back(f);
  }

  r.dual_pencil_size = duals.size();
  if (duals.size() >= 3) {
    const PencilRank pr = pencil_rank(duals, tol.pencil);
    r.dual_pencil_rank = pr.rank;
    r.dual_pencil_gap = pr.singular_ratios[2];
  }

  for (int i = 0; i <= half; ++i) {
    for (int j = i + 1; j <= half; ++j) {
      r.concentric_equivalence.push_back(detail::projective_match(
          i, j, qsets[static_cast<std::size_t>(i)], qsets[static_cast<std::size_t>(j)], tol.equivalence));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      r.radial_equivalence.push_back(detail::projective_match(
          i, j, rsets[static_cast<std::size_t>(i)], rsets[static_cast<std::size_t>(j)], tol.equivalence));
    }
  }

  const auto ok = [](const auto& v) { return std::all_of(v.begin(), v.end(), [](const auto& x) { return x.passed; }); };
  r.conics_ok = ok(r.concentric) && ok(r.radial) && r.q0_inner_distance < 1e-8;
  r.tangents_ok = r.dual_pencil_size >= 3 && r.dual_pencil_gap < tol.pencil;
  r.equivalence_ok = ok(r.concentric_equivalence) && ok(r.radial_equivalence);
  r.passed = r.conics_ok && r.tangents_ok && r.equivalence_ok;
  return r;
}

struct SetParameter {
  int index = 0;
  double lambda = 0.0;  ///< mean family parameter of the set
  double spread = 0.0;  ///< max - min over the set
  bool in_range = false;
};

struct ConfocalGridReport {
  std::vector<SetParameter> concentric;
  std::vector<SetParameter> radial;
  bool increasing = false;
  bool passed = false;
};

/// Family parameter of every concentric set (ellipse root) and radial set
/// (hyperbola root). Throws NotConfocal when a set's parameters spread by
/// more than tol.
inline ConfocalGridReport confocal_grid_check(const PonceletGrid& g, const ConfocalFamily& f, double tol = 1e-8) {
  ConfocalGridReport r;
  const int n = g.n();
  auto gather = [&](int k, const std::vector<HomPoint>& pts, bool ellipse) {
    SetParameter sp;
    sp.index = k;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    int count = 0;
    for (const auto& p : pts) {
      if (p.is_ideal()) continue;
      const double lam = ellipse ? ellipse_param(f, p.xy()) : hyperbola_param(f, p.xy());
      lo = std::min(lo, lam);
      hi = std::max(hi, lam);
      sum += lam;
      ++count;
    }
    if (count == 0) fail(Errc::NotConfocal, "set " + std::to_string(k) + " has no affine points");
    sp.lambda = sum / count;
    sp.spread = hi - lo;
    sp.in_range = ellipse ? f.is_ellipse_param(lo) : (f.is_hyperbola_param(lo) && f.is_hyperbola_param(hi));
    if (!(sp.spread < tol)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%c%d parameter spread %.3g exceeds %.3g", ellipse ? 'Q' : 'R', k, sp.spread, tol);
      fail(Errc::NotConfocal, buf);
    }
    return sp;
  };
  for (int k = 0; 2 * k <= n - 1; ++k) r.concentric.push_back(gather(k, concentric_set(g, k), true));
  for (int k = 0; k < n; ++k) r.radial.push_back(gather(k, radial_set(g, k), false));
  r.increasing = true;
  for (std::size_t k = 1; k < r.concentric.size(); ++k) {
    r.increasing = r.increasing && r.concentric[k].lambda > r.concentric[k - 1].lambda;
  }
  const auto in_range = [](const auto& v) {
    return std::all_of(v.begin(), v.end(), [](const SetParameter& s) { return s.in_range; });
  };
  r.passed = r.increasing && in_range(r.concentric) && in_range(r.radial);
  return r;
}

struct TransportResult {
  int sign = 1;
  double max_error = 0.0;        ///< of the matching sign, relative to diam(Q_j)
  double other_sign_error = 0.0;
};

/// Applies the diagonal transport between the ellipses of Q_i and Q_j with
/// both signs and reports the one carrying Q_i onto Q_j as a point set.
inline TransportResult transport_check(const PonceletGrid& g, const ConfocalFamily& f, int i, int j,
                                       double tol = 1e-9) {
  const auto qi = concentric_set(g, i);
  const auto qj = concentric_set(g, j);
  if (detail::any_ideal(qi) || detail::any_ideal(qj)) fail(Errc::NoSignMatches, "concentric set has ideal points");
  const auto xi = detail::affine_points(qi);
  const auto xj = detail::affine_points(qj);
  const double li = ellipse_param(f, xi.front());
  const double lj = ellipse_param(f, xj.front());
  const double diam = std::max(diameter(xj), 1e-300);
  std::array<double, 2> err{};
  for (int s = 0; s < 2; ++s) {
    const ProjMap a = transport_map(f, li, lj, s == 0 ? 1 : -1);
    double worst = 0.0;
    for (const auto& p : xi) {
      const Eigen::Vector2d img = a.apply(HomPoint::from_xy(p)).xy();
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& q : xj) nearest = std::min(nearest, (img - q).norm());
      worst = std::max(worst, nearest);
    }
    err[static_cast<std::size_t>(s)] = worst / diam;
  }
  if (err[0] < tol) return {1, err[0], err[1]};
  if (err[1] < tol) return {-1, err[1], err[0]};
  fail(Errc::NoSignMatches, "neither sign carries Q" + std::to_string(i) + " onto Q" + std::to_string(j));
}

struct CellIncircle {
  int i = 0;
  int j = 0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  double discrepancy = 0.0;  ///< |distance to 4th line - radius| / radius
};

/// Circle tangent to l_i, l_{i+1}, l_j from inside the cell with vertices
/// {i,j}, {i+1,j}, {i+1,j+1}, {i,j+1}, and its mismatch with l_{j+1}.
inline CellIncircle incircle_check(const PonceletGrid& g, int i, int j) {
  const int n = g.n();
  const int d = static_cast<int>((g.wrap(j - i)));
  if (d == 0 || d == 1 || d == n - 1) fail(Errc::DegenerateQuad, "cell lines must be four distinct lines");
  const std::array<HomPoint, 4> hv{g.point(i, j), g.point(i + 1, j), g.point(i + 1, j + 1), g.point(i, j + 1)};
  std::array<Eigen::Vector2d, 4> v;
  for (std::size_t t = 0; t < 4; ++t) {
    if (hv[t].is_ideal()) fail(Errc::DegenerateQuad, "cell has a vertex at infinity");
    v[t] = hv[t].xy();
  }
  double scale = 0.0;
  for (std::size_t t = 0; t < 4; ++t) scale = std::max(scale, (v[t] - v[(t + 1) % 4]).norm());
  int sign = 0;
  for (std::size_t t = 0; t < 4; ++t) {
    const Eigen::Vector2d e1 = v[(t + 1) % 4] - v[t];
    const Eigen::Vector2d e2 = v[(t + 2) % 4] - v[(t + 1) % 4];
    const double c = e1.x() * e2.y() - e1.y() * e2.x();
    if (std::abs(c) <= 1e-12 * scale * scale) fail(Errc::DegenerateQuad, "cell is degenerate");
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) fail(Errc::NonConvexCell, "cell (" + std::to_string(i) + "," + std::to_string(j) + ") is not convex");
  }
  const Eigen::Vector2d centroid = (v[0] + v[1] + v[2] + v[3]) / 4.0;
  // Orient every line so the cell interior has positive signed distance.
  std::array<Eigen::Vector3d, 4> ls;
  const std::array<int, 4> idx{i, i + 1, j, j + 1};
  for (std::size_t t = 0; t < 4; ++t) {
    Eigen::Vector3d l = g.line(idx[t]).vec();
    l /= l.head<2>().norm();
    if (l.dot(Eigen::Vector3d(centroid.x(), centroid.y(), 1.0)) < 0) l = -l;
    ls[t] = l;
  }
  Eigen::Matrix3d a;
  Eigen::Vector3d b;
  for (int t = 0; t < 3; ++t) {
    a.row(t) << ls[static_cast<std::size_t>(t)].x(), ls[static_cast<std::size_t>(t)].y(), -1.0;
    b[t] = -ls[static_cast<std::size_t>(t)].z();
  }
  const Eigen::Vector3d sol = a.fullPivLu().solve(b);
  CellIncircle out;
  out.i = static_cast<int>(g.wrap(i));
  out.j = static_cast<int>(g.wrap(j));
  out.center = sol.head<2>();
  out.radius = sol.z();
  if (!(out.radius > 0)) fail(Errc::DegenerateQuad, "no circle inside the cell touches three of its sides");
  const double dist4 = ls[3].dot(Eigen::Vector3d(out.center.x(), out.center.y(), 1.0));
  out.discrepancy = std::abs(dist4 - out.radius) / out.radius;
  return out;
}

struct IncircleSurvey {
  std::vector<CellIncircle> cells;
  std::vector<std::pair<int, int>> skipped;  ///< non-convex cells
  double max_discrepancy = 0.0;
  bool passed = false;
};

/// incircle_check over every cell i < j with four distinct lines.
inline IncircleSurvey incircle_survey(const PonceletGrid& g, double tol = 1e-8) {
  IncircleSurvey s;
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (j - i == n - 1) continue;
      try {
        s.cells.push_back(incircle_check(g, i, j));
        s.max_discrepancy = std::max(s.max_discrepancy, s.cells.back().discrepancy);
      } catch (const GeometryError& e) {
        if (e.code() != Errc::NonConvexCell && e.code() != Errc::DegenerateQuad) throw;
        s.skipped.emplace_back(i, j);
      }
    }
  }
  s.passed = !s.cells.empty() && s.max_discrepancy < tol;
  return s;
}

}  // namespace poncelet
