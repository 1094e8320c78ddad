#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poncelet/confocal.hpp"
#include "poncelet/grid.hpp"
#include "poncelet/kasner.hpp"
#include "poncelet/poncelet.hpp"
#include "poncelet/sampling.hpp"
#include "poncelet/scene.hpp"
#include "poncelet/svg.hpp"

namespace poncelet::acceptance {

struct Options {
  std::optional<double> tol_override;  ///< replaces every positive-check tolerance
  std::uint64_t seed = 7;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

inline double pick(const Options& o, double pinned) { return o.tol_override.value_or(pinned); }

/// Confocal polygons for F(4,1), outer parameter 0, shared by several criteria.
class Context {
 public:
  const ConfocalFamily family{4.0, 1.0};

  const PonceletPolygon& polygon(int n) {
    auto it = cache_.find(n);
    if (it == cache_.end()) it = cache_.emplace(n, confocal_poncelet_polygon(family, 0.0, n, 1)).first;
    return it->second;
  }

 private:
  std::map<int, PonceletPolygon> cache_;
};

inline std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t c = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++c;
  return c;
}

/// Circumradius about the origin of a polygon centered there.
inline double mean_radius(const Polygon& p) {
  double s = 0.0;
  for (const auto& v : p.points()) s += v.norm();
  return s / static_cast<double>(p.size());
}

/// Line through two affine points meets line through two others, by Cramer's rule.
inline Eigen::Vector2d cramer_meet(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                                   const Eigen::Vector2d& d) {
  const Eigen::Vector2d r = b - a;
  const Eigen::Vector2d s = d - c;
  const double den = r.x() * s.y() - r.y() * s.x();
  const double t = ((c - a).x() * s.y() - (c - a).y() * s.x()) / den;
  return a + t * r;
}

}  // namespace detail

inline CriterionResult random_pentagons(const Options& o, detail::Context&) {
  const double tol = detail::pick(o, 1e-8);
  std::mt19937_64 rng(o.seed);
  double worst = 0.0;
  int failed = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int s = 0; s < 200; ++s) {
    const Polygon p = random_convex_polygon(rng, 5);
    const CommutationReport r = commute_check(p, as_poncelet_pentagon(p).pair.inner, 2, tol);
    worst = std::max(worst, r.max_vertex_error);
    failed += r.passed ? 0 : 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {1, "pentagon commutation, 200 random pentagons", failed == 0 && secs < 5.0,
          detail::format("worst %.3g (tol %.1g), %d failed, %.2f s (budget 5 s)", worst, tol, failed, secs), 0.0};
}

inline CriterionResult confocal_commutation(const Options& o, detail::Context& ctx) {
  const double tol = detail::pick(o, 1e-8);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int checks = 0;
  int failed = 0;
  for (int n : {7, 9, 11}) {
    const PonceletPolygon& p = ctx.polygon(n);
    for (int k = 2; 2 * k < n; ++k) {
      const CommutationReport r = commute_check(p, k, tol);
      worst = std::max(worst, r.max_vertex_error);
      ++checks;
      failed += r.passed ? 0 : 1;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {2, "confocal n-gon commutation, n = 7, 9, 11", failed == 0 && secs < 10.0,
          detail::format("%d checks, worst %.3g (tol %.1g), %d failed, %.2f s (budget 10 s)", checks, worst, tol,
                         failed, secs),
          0.0};
}

inline CriterionResult porism(const Options& o, detail::Context& ctx) {
  const double tol = detail::pick(o, 1e-7);
  const double broken = 1e-4;
  double worst = 0.0;
  double weakest_break = std::numeric_limits<double>::infinity();
  for (int n : {7, 9, 11}) {
    const PonceletPair& pair = ctx.polygon(n).pair;
    worst = std::max(worst, porism_check(pair, 20, o.seed + static_cast<std::uint64_t>(n)).max_error);
    PonceletPair bent = pair;
    const double lam = pair.confocal->lambda_inner + 1e-3;
    bent.inner = conic_at(ctx.family, lam);
    weakest_break = std::min(weakest_break, closure_error(bent, ellipse_point(bent.outer, 0.4)));
  }
  return {3, "porism: 20 random starts per pair, perturbed pair fails", worst < tol && weakest_break > broken,
          detail::format("worst closure %.3g (tol %.1g); perturbed closure >= %.3g (need > %.1g)", worst, tol,
                         weakest_break, broken),
          0.0};
}

inline CriterionResult grid_theorem(const Options& o, detail::Context& ctx) {
  const double fit = detail::pick(o, 1e-9);
  const double pencil = detail::pick(o, 1e-8);
  const double equiv = detail::pick(o, 1e-7);
  const PonceletGrid g = build_grid(ctx.polygon(9));
  const GridReport r = verify_grid_theorem(g, {fit, pencil, equiv});
  int ellipses = 0;
  double residual = 0.0;
  for (const auto& f : r.concentric) {
    ellipses += (f.cls == ConicClass::real_ellipse && f.residual < fit) ? 1 : 0;
    residual = std::max(residual, f.residual);
  }
  int hyperbolas = 0;
  for (const auto& f : r.radial) hyperbolas += f.cls == ConicClass::hyperbola ? 1 : 0;
  double eq = 0.0;
  bool eq_ok = !r.concentric_equivalence.empty();
  for (const auto& e : r.concentric_equivalence) {
    eq = std::max(eq, e.error);
    eq_ok = eq_ok && e.passed;
  }
  const bool ok = g.size() == 45 && r.concentric.size() == 5 && ellipses == 5 && r.radial.size() == 9 &&
                  hyperbolas == 9 && r.dual_pencil_gap < pencil && eq_ok;
  return {4, "grid theorem, n = 9", ok,
          detail::format("%zu points, %d/5 ellipses (residual %.2g), %d/9 hyperbolas, dual gap %.2g, Q equivalence %.2g",
                         g.size(), ellipses, residual, hyperbolas, r.dual_pencil_gap, eq),
          0.0};
}

inline CriterionResult confocal_grid(const Options& o, detail::Context& ctx) {
  const double spread_tol = detail::pick(o, 1e-8);
  const double transport_tol = detail::pick(o, 1e-9);
  const PonceletGrid g = build_grid(ctx.polygon(9));
  try {
    const ConfocalGridReport c = confocal_grid_check(g, ctx.family, spread_tol);
    const int half = (g.n() - 1) / 2;
    std::vector<std::vector<int>> sign(static_cast<std::size_t>(half + 1), std::vector<int>(half + 1, 1));
    double worst = 0.0;
    for (int i = 0; i <= half; ++i) {
      for (int j = 0; j <= half; ++j) {
        const TransportResult t = transport_check(g, ctx.family, i, j, transport_tol);
        sign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = t.sign;
        worst = std::max(worst, t.max_error);
      }
    }
    bool composition = true;
    bool parity = true;
    for (int i = 0; i <= half; ++i) {
      for (int j = 0; j <= half; ++j) {
        const int sij = sign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        parity = parity && sij == (((i - j) % 2 == 0) ? 1 : -1);
        for (int k = 0; k <= half; ++k) {
          composition = composition && sign[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] ==
                                           sij * sign[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        }
      }
    }
    double spread = 0.0;
    for (const auto& s : c.concentric) spread = std::max(spread, s.spread);
    for (const auto& s : c.radial) spread = std::max(spread, s.spread);
    return {5, "confocal grid parameters and transport maps", c.passed && composition && parity,
            detail::format("max spread %.2g, Q increasing %s, transport error %.2g, composition %s, parity %s", spread,
                           c.increasing ? "yes" : "no", worst, composition ? "ok" : "broken",
                           parity ? "ok" : "broken"),
            0.0};
  } catch (const GeometryError& e) {
    return {5, "confocal grid parameters and transport maps", false, e.what(), 0.0};
  }
}

inline CriterionResult pencil(const Options& o, detail::Context& ctx) {
  const double tol = detail::pick(o, 1e-8);
  double worst = 0.0;
  bool ok = true;
  double weakest_control = std::numeric_limits<double>::infinity();
  const std::vector<std::pair<int, int>> cases{{7, 3}, {9, 2}, {9, 3}, {9, 4}};
  for (const auto& [n, k] : cases) {
    const PencilRemarkReport r = pencil_remark_check(ctx.polygon(n), k, tol);
    worst = std::max(worst, r.rank_gap);
    weakest_control = std::min(weakest_control, r.negative_gap);
    ok = ok && r.passed && r.negative_rank == 3;
  }
  return {6, "pencil of outer conic and two diagonal conics", ok,
          detail::format("worst rank gap %.2g (tol %.1g); control gap >= %.2g (rank 3)", worst, tol, weakest_control),
          0.0};
}

inline CriterionResult incircles(const Options& o, detail::Context& ctx) {
  const double tol = detail::pick(o, 1e-8);
  const PonceletPolygon& p = ctx.polygon(9);
  const IncircleSurvey s = incircle_survey(build_grid(p), tol);
  // A projective map that is not a similarity keeps tangency but not circles.
  Eigen::Matrix3d m;
  m << 1.0, 0.3, 0.1, 0.0, 0.8, -0.2, 0.05, 0.08, 1.0;
  const IncircleSurvey skew = incircle_survey(build_grid(transformed(p, ProjMap(m))), tol);
  const double control = 1e-4;
  return {7, "incircles of the confocal grid cells",
          s.passed && !skew.cells.empty() && skew.max_discrepancy > control,
          detail::format("%zu cells, %zu non-convex skipped, worst %.2g (tol %.1g); skewed grid worst %.2g (need > %.0e)",
                         s.cells.size(), s.skipped.size(), s.max_discrepancy, tol, skew.max_discrepancy, control),
          0.0};
}

inline CriterionResult regular_pentagon(const Options& o, detail::Context&) {
  const double tol = detail::pick(o, 1e-10);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double d_oracle = 1.0 / (phi * phi);
  const double i_oracle = std::cos(M_PI / 5.0);
  // Brute force: diagonal meets by Cramer's rule, tangency points as side midpoints.
  const Polygon p = regular_polygon(5);
  std::vector<Eigen::Vector2d> v(p.points().begin(), p.points().end());
  const double d_brute = detail::cramer_meet(v[0], v[2], v[1], v[3]).norm();
  const double i_brute = (0.5 * (v[0] + v[1])).norm();

  const double d_lib = detail::mean_radius(diagonal_polygon(p, 2));
  const Conic incircle = Conic::circle(i_oracle);
  const double i_lib = detail::mean_radius(tangency_polygon(p, incircle));
  const double c_lib = detail::mean_radius(diagonal_polygon(tangency_polygon(p, incircle), 2));
  const double err = std::max({std::abs(d_lib - d_oracle), std::abs(d_brute - d_oracle), std::abs(i_lib - i_oracle),
                               std::abs(i_brute - i_oracle), std::abs(c_lib - d_oracle * i_oracle)});
  return {8, "regular pentagon scale ratios", err < tol,
          detail::format("D %.10f, I %.10f, DI %.10f; max deviation %.2g (tol %.1g)", d_lib, i_lib, c_lib, err, tol),
          0.0};
}

inline CriterionResult figures(const Options& o, detail::Context&) {
  struct Case {
    std::string name;
    SceneDocument doc;
    Figure fig;
    int k;
    std::size_t polygons, conics_min, lines, points, circles;
  };
  std::vector<Case> cases;
  cases.push_back({"pentagon", generate_pentagon_scene(o.seed), Figure::pentagon, 0, 4, 2, 0, 0, 0});
  GenOptions g7;
  cases.push_back({"kasner-nk", generate_confocal_scene(g7), Figure::kasner_nk, 3, 4, 3, 0, 0, 0});
  GenOptions g9;
  g9.n = 9;
  const SceneDocument doc9 = generate_confocal_scene(g9);
  const std::size_t cells = incircle_survey(build_grid(poncelet_from_scene(doc9))).cells.size();
  cases.push_back({"grid", doc9, Figure::grid, 0, 0, 5, 9, 45, 0});
  cases.push_back({"incircles", doc9, Figure::incircles, 0, 0, 1, 9, 0, cells});
  std::string summary;
  bool ok = true;
  for (const auto& c : cases) {
    const std::string a = render_figure(c.doc, c.fig, c.k);
    const std::string b = render_figure(read_scene(write_scene(c.doc)), c.fig, c.k);
    const std::size_t np = detail::count(a, "class=\"polygon ");
    const std::size_t nc = detail::count(a, "class=\"conic ");
    const std::size_t nl = detail::count(a, "class=\"grid-line\"");
    const std::size_t npt = detail::count(a, "class=\"point ");
    const std::size_t ncir = detail::count(a, "class=\"incircle\"");
    const bool good = a == b && np == c.polygons && nc >= c.conics_min && nl == c.lines && npt == c.points &&
                      ncir == c.circles;
    ok = ok && good;
    summary += detail::format("%s%s[%zu poly, %zu conic, %zu line, %zu pt, %zu circle%s]", summary.empty() ? "" : " ",
                             c.name.c_str(), np, nc, nl, npt, ncir, a == b ? "" : ", nondeterministic");
  }
  return {9, "figure rendering structure and determinism", ok, summary, 0.0};
}

using Criterion = std::function<CriterionResult(const Options&, detail::Context&)>;

inline std::vector<Criterion> library_criteria() {
  return {random_pentagons, confocal_commutation, porism, grid_theorem, confocal_grid,
          pencil,           incircles,            regular_pentagon, figures};
}

/// Runs criteria 1-9. Construction errors are reported as failures.
inline std::vector<CriterionResult> run_library_criteria(const Options& o) {
  detail::Context ctx;
  std::vector<CriterionResult> out;
  int id = 1;
  for (const auto& c : library_criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c(o, ctx);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
    ++id;
  }
  return out;
}

}  // namespace poncelet::acceptance
