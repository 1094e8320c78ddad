#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poncelet/grid.hpp"
#include "poncelet/kasner.hpp"
#include "poncelet/scene.hpp"

namespace poncelet {

enum class Figure { pentagon, kasner_nk, grid, incircles };

inline std::optional<Figure> parse_figure(std::string_view s) {
  if (s == "pentagon") return Figure::pentagon;
  if (s == "kasner-nk") return Figure::kasner_nk;
  if (s == "grid") return Figure::grid;
  if (s == "incircles") return Figure::incircles;
  return std::nullopt;
}

inline constexpr int kConicSamples = 256;

/// Collects geometry in model coordinates (y up) and writes SVG 1.1 in a
/// square viewport (y down). The only transform is
///   X = ox + s (x - xmin),  Y = oy + s (ymax - y)
/// with s chosen so the bounding box of all content fits the viewport and
/// (ox, oy) centering it.
class SvgCanvas {
 public:
  void conic(const Conic& c, std::string cls) {
    if (classify(c) != ConicClass::real_ellipse) return;
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(kConicSamples);
    for (int i = 0; i < kConicSamples; ++i) pts.push_back(ellipse_point(c, 2.0 * M_PI * i / kConicSamples).xy());
    extend(pts);
    conics_.push_back({std::move(pts), std::move(cls)});
  }

  void polygon(const Polygon& p, std::string cls) {
    std::vector<Eigen::Vector2d> pts(p.points().begin(), p.points().end());
    extend(pts);
    polygons_.push_back({std::move(pts), std::move(cls)});
  }

  void line(const HomLine& l) { lines_.push_back(l.vec()); }

  void point(const HomPoint& p, std::string cls) {
    if (p.is_ideal()) return;
    extend({p.xy()});
    points_.push_back({p.xy(), std::move(cls)});
  }

  void circle(const Eigen::Vector2d& c, double r) {
    extend({c + Eigen::Vector2d(r, r), c - Eigen::Vector2d(r, r)});
    circles_.push_back({c, r});
  }

  std::string str() const {
    const double size = 800.0;
    const double margin = 20.0;
    const double w = std::max(hi_.x() - lo_.x(), 1e-12);
    const double h = std::max(hi_.y() - lo_.y(), 1e-12);
    const double s = (size - 2 * margin) / std::max(w, h);
    // center the shorter side of the content box
    const double ox = margin + 0.5 * (size - 2 * margin - s * w);
    const double oy = margin + 0.5 * (size - 2 * margin - s * h);
    auto X = [&](double x) { return ox + s * (x - lo_.x()); };
    auto Y = [&](double y) { return oy + s * (hi_.y() - y); };
    auto num = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", v);
      std::string out(buf);
      return out == "-0.0000" ? std::string("0.0000") : out;
    };
    auto path = [&](const std::vector<Eigen::Vector2d>& pts) {
      std::string d;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        d += (i == 0 ? "M " : " L ") + num(X(pts[i].x())) + " " + num(Y(pts[i].y()));
      }
      return d + " Z";
    };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 800 800\">\n";
    out += "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    out += "<g id=\"conics\" fill=\"none\" stroke=\"#3060c0\" stroke-width=\"1\">\n";
    for (const auto& c : conics_) out += "<path class=\"conic " + c.cls + "\" d=\"" + path(c.pts) + "\"/>\n";
    out += "</g>\n<g id=\"lines\" stroke=\"#909090\" stroke-width=\"0.75\">\n";
    // Lines are clipped to the content box grown by 5%.
    const Eigen::Vector2d pad = 0.05 * (hi_ - lo_);
    const Eigen::Vector2d blo = lo_ - pad;
    const Eigen::Vector2d bhi = hi_ + pad;
    for (const auto& l : lines_) {
      const auto seg = clip(l, blo, bhi);
      if (!seg) continue;
      out += "<line class=\"grid-line\" x1=\"" + num(X(seg->first.x())) + "\" y1=\"" + num(Y(seg->first.y())) +
             "\" x2=\"" + num(X(seg->second.x())) + "\" y2=\"" + num(Y(seg->second.y())) + "\"/>\n";
    }
    out += "</g>\n<g id=\"polygons\" fill=\"none\" stroke=\"#202020\" stroke-width=\"1.25\">\n";
    for (const auto& p : polygons_) out += "<path class=\"polygon " + p.cls + "\" d=\"" + path(p.pts) + "\"/>\n";
    out += "</g>\n<g id=\"circles\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1\">\n";
    for (const auto& c : circles_) {
      out += "<circle class=\"incircle\" cx=\"" + num(X(c.c.x())) + "\" cy=\"" + num(Y(c.c.y())) + "\" r=\"" +
             num(s * c.r) + "\"/>\n";
    }
    out += "</g>\n<g id=\"points\" fill=\"#202020\">\n";
    for (const auto& p : points_) {
      out += "<circle class=\"point " + p.cls + "\" cx=\"" + num(X(p.p.x())) + "\" cy=\"" + num(Y(p.p.y())) +
             "\" r=\"2.5\"/>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
  }

 private:
  struct Curve {
    std::vector<Eigen::Vector2d> pts;
    std::string cls;
  };
  struct Marker {
    Eigen::Vector2d p;
    std::string cls;
  };
  struct Circle {
    Eigen::Vector2d c;
    double r;
  };

  void extend(const std::vector<Eigen::Vector2d>& pts) {
    for (const auto& p : pts) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
  }

  static std::optional<std::pair<Eigen::Vector2d, Eigen::Vector2d>> clip(const Eigen::Vector3d& l,
                                                                         const Eigen::Vector2d& lo,
                                                                         const Eigen::Vector2d& hi) {
    std::vector<Eigen::Vector2d> hits;
    const double eps = 1e-9 * (hi - lo).norm();
    auto inside = [&](const Eigen::Vector2d& p) {
      return p.x() >= lo.x() - eps && p.x() <= hi.x() + eps && p.y() >= lo.y() - eps && p.y() <= hi.y() + eps;
    };
    if (std::abs(l.y()) > 0) {
      for (double x : {lo.x(), hi.x()}) {
        const Eigen::Vector2d p(x, -(l.x() * x + l.z()) / l.y());
        if (inside(p)) hits.push_back(p);
      }
    }
    if (std::abs(l.x()) > 0) {
      for (double y : {lo.y(), hi.y()}) {
        const Eigen::Vector2d p(-(l.y() * y + l.z()) / l.x(), y);
        if (inside(p)) hits.push_back(p);
      }
    }
    if (hits.size() < 2) return std::nullopt;
    std::pair<Eigen::Vector2d, Eigen::Vector2d> best{hits[0], hits[1]};
    for (std::size_t i = 0; i < hits.size(); ++i) {
      for (std::size_t j = i + 1; j < hits.size(); ++j) {
        if ((hits[i] - hits[j]).norm() > (best.first - best.second).norm()) best = {hits[i], hits[j]};
      }
    }
    return best;
  }

  Eigen::Vector2d lo_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Eigen::Vector2d hi_{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  std::vector<Curve> conics_;
  std::vector<Curve> polygons_;
  std::vector<Eigen::Vector3d> lines_;
  std::vector<Marker> points_;
  std::vector<Circle> circles_;
};

/// Default diagonal order for the kasner figure: 3 when legal, else 2.
inline int default_figure_k(std::size_t n) { return (2 * 3 < static_cast<int>(n)) ? 3 : 2; }

/// Renders one of the four figure layouts from a scene. `k` = 0 picks the
/// default diagonal order.
inline std::string render_figure(const SceneDocument& doc, Figure fig, int k = 0) {
  SvgCanvas canvas;
  switch (fig) {
    case Figure::pentagon: {
      // P, D(P), I(P), ID(P) = DI(P); inscribed conics of P and of D(P)
      const Polygon p = doc.polygon("P").polygon();
      if (p.size() != 5) fail(Errc::MissingLabel, "pentagon figure needs a five-vertex polygon 'P'");
      const Conic inner = doc.has_conic("inner") ? doc.conic("inner").conic() : inscribed_conic([&] {
        std::vector<HomLine> s;
        for (std::ptrdiff_t i = 0; i < 5; ++i) s.push_back(p.side(i));
        return s;
      }());
      const Polygon d = diagonal_polygon(p, 2);
      std::vector<HomLine> dsides;
      for (std::ptrdiff_t i = 0; i < 5; ++i) dsides.push_back(d.side(i));
      const Conic d_inner = inscribed_conic(dsides);
      canvas.conic(inner, "inscribed");
      canvas.conic(d_inner, "inscribed-diagonal");
      canvas.polygon(p, "P");
      canvas.polygon(d, "D");
      canvas.polygon(tangency_polygon(p, inner), "I");
      canvas.polygon(tangency_polygon(d, d_inner), "ID");
      break;
    }
    case Figure::kasner_nk: {
      const PonceletPolygon p = poncelet_from_scene(doc);
      if (k == 0) k = default_figure_k(p.n());
      const Polygon d = diagonal_polygon(p.polygon, k);
      std::vector<HomLine> diags;
      for (std::size_t i = 0; i < p.n(); ++i) diags.push_back(diagonal(p.polygon, static_cast<std::ptrdiff_t>(i), k));
      const Conic d_inner = inscribed_conic(diags);
      canvas.conic(p.pair.inner, "inner");
      canvas.conic(p.pair.outer, "outer");
      if (p.n() % 2 == 1) {
        canvas.conic(fit_conic(concentric_set(build_grid(p), k)).conic, "delta");
        canvas.conic(fit_conic(outer_tangent_meets(p, k)).conic, "big-delta");
      }
      canvas.conic(d_inner, "inscribed-diagonal");
      canvas.polygon(p.polygon, "P");
      canvas.polygon(d, "D");
      canvas.polygon(tangency_polygon(p.polygon, p.pair.inner), "I");
      canvas.polygon(tangency_polygon(d, d_inner), "ID");
      break;
    }
    case Figure::grid: {
      const PonceletGrid g = build_grid(poncelet_from_scene(doc));
      for (int q = 0; 2 * q <= g.n() - 1; ++q) {
        const auto set = concentric_set(g, q);
        if (std::none_of(set.begin(), set.end(), [](const HomPoint& x) { return x.is_ideal(); })) {
          canvas.conic(fit_conic(set).conic, "Q" + std::to_string(q));
        }
      }
      for (const auto& l : g.lines()) canvas.line(l);
      for (const auto& pt : g.points()) canvas.point(pt, "grid");
      break;
    }
    case Figure::incircles: {
      const PonceletGrid g = build_grid(poncelet_from_scene(doc));
      canvas.conic(g.inner(), "inner");
      for (const auto& l : g.lines()) canvas.line(l);
      for (const auto& c : incircle_survey(g).cells) canvas.circle(c.center, c.radius);
      break;
    }
  }
  return canvas.str();
}

}  // namespace poncelet
