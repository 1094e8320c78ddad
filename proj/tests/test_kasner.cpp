#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "poncelet/kasner.hpp"
#include "poncelet/sampling.hpp"

using namespace poncelet;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;
const ConfocalFamily kFamily(4.0, 1.0);

// Meet of line ab with line cd by Cramer's rule.
Eigen::Vector2d cramer(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                       const Eigen::Vector2d& d) {
  const Eigen::Vector2d r = b - a, s = d - c;
  const double t = ((c - a).x() * s.y() - (c - a).y() * s.x()) / (r.x() * s.y() - r.y() * s.x());
  return a + t * r;
}

double polar(const Eigen::Vector2d& v) { return std::atan2(v.y(), v.x()); }

std::vector<HomLine> sides(const Polygon& p) {
  std::vector<HomLine> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(p.side(static_cast<std::ptrdiff_t>(i)));
  return out;
}

}  // namespace

TEST(Kasner, RegularPentagonDiagonalScale) {
  const Polygon p = regular_polygon(5);
  const Polygon d = diagonal_polygon(p, 2);
  const Eigen::Vector2d brute = cramer(p.xy(0), p.xy(2), p.xy(1), p.xy(3));
  EXPECT_NEAR(brute.norm(), 0.3819660113, 1e-10);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(d.xy(static_cast<std::ptrdiff_t>(i)).norm(), 1.0 / (kPhi * kPhi), 1e-12);
  }
  EXPECT_NEAR((d.xy(0) - brute).norm(), 0.0, 1e-14);
  // vertex 0 lies on the bisector of vertices 1 and 2
  EXPECT_NEAR(polar(d.xy(0)), polar(p.xy(1)) + M_PI / 5, 1e-12);
}

TEST(Kasner, RegularPentagonTangencyScale) {
  const Polygon p = regular_polygon(5);
  const Polygon t = tangency_polygon(p);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    EXPECT_NEAR(t.xy(ii).norm(), 0.8090169944, 1e-10);
    EXPECT_NEAR((t.xy(ii) - 0.5 * (p.xy(ii) + p.xy(ii + 1))).norm(), 0.0, 1e-12);
  }
  const Polygon both = diagonal_polygon(t, 2);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(both.xy(static_cast<std::ptrdiff_t>(i)).norm(), 0.3090169944, 1e-10);
}

TEST(Kasner, RegularPolygonsStayRegular) {
  for (int n : {7, 8, 11}) {
    for (int k = 2; 2 * k < n; ++k) {
      const Polygon d = diagonal_polygon(regular_polygon(static_cast<std::size_t>(n), 1.0, 0.3), k);
      const double r = d.xy(0).norm();
      for (int i = 0; i < n; ++i) EXPECT_NEAR(d.xy(i).norm(), r, 1e-12);
      EXPECT_NEAR(d.centroid().norm(), 0.0, 1e-12);
      // oracle: distance from the center to a k-diagonal over cos(pi/n)
      EXPECT_NEAR(r, std::cos(M_PI * k / n) / std::cos(M_PI / n), 1e-12);
    }
  }
}

TEST(Kasner, RegularPentagonCommutes) {
  const Polygon p = regular_polygon(5);
  const CommutationReport r = commute_check(p, Conic::circle(std::cos(M_PI / 5)), 2);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_vertex_error, 1e-12);
}

TEST(Kasner, RandomPentagonsCommute) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const Polygon p = random_convex_polygon(rng);
    const Conic inner = inscribed_conic(sides(p));
    const Polygon tp = tangency_polygon(p);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_LT(inner.residual(tp.vertex(static_cast<std::ptrdiff_t>(i))), 1e-9);
    const CommutationReport r = commute_check(p, inner, 2);
    EXPECT_TRUE(r.passed) << t << " " << r.max_vertex_error;
  }
}

TEST(Kasner, ConfocalPolygonsCommuteForEveryK) {
  for (int n : {7, 9, 11}) {
    const PonceletPolygon p = confocal_poncelet_polygon(kFamily, 0.0, n, 1);
    for (int k = 2; 2 * k < n; ++k) {
      const CommutationReport r = commute_check(p, k);
      EXPECT_TRUE(r.passed) << n << "," << k;
      EXPECT_LT(r.max_vertex_error, 1e-8);
    }
  }
}

TEST(Kasner, HeptagonDiagonalPolygonIsInscribed) {
  const PonceletPolygon p = confocal_poncelet_polygon(kFamily, 0.0, 7, 1);
  EXPECT_LT(fit_conic(diagonal_polygon(p.polygon, 3).vertices()).residual, 1e-9);
}

TEST(Kasner, TangencyPolygonIsTheInnerConcentricSet) {
  const PonceletPolygon p = confocal_poncelet_polygon(kFamily, 0.0, 7, 1);
  const Polygon t = tangency_polygon(p.polygon, p.pair.inner);
  const auto q0 = concentric_set(build_grid(p), 0);
  for (std::size_t i = 0; i < 7; ++i) {
    bool found = false;
    for (const auto& q : q0) found = found || q.equivalent(t.vertex(static_cast<std::ptrdiff_t>(i)), 1e-9);
    EXPECT_TRUE(found);
  }
  try {
    (void)tangency_polygon(p.polygon);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), Errc::MissingConic);
  }
}

TEST(Kasner, WrongConicIsRejected) {
  const Polygon p = regular_polygon(5);
  try {
    (void)tangency_polygon(p, Conic::circle(0.5));
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), Errc::NotCircumscribed);
  }
}

TEST(Kasner, DiagonalOrderValidated) {
  const Polygon p = regular_polygon(7);
  for (int k : {1, 4, 0}) {
    try {
      (void)diagonal_polygon(p, k);
      FAIL() << k;
    } catch (const GeometryError& e) {
      EXPECT_EQ(e.code(), Errc::BadK);
    }
  }
}

TEST(Kasner, StarPolygonsAreNotCertified) {
  const PonceletPolygon p = confocal_poncelet_polygon(kFamily, 0.0, 7, 2);
  EXPECT_THROW((void)commute_check(p, 2), GeometryError);
  EXPECT_THROW((void)pencil_remark_check(p, 2), GeometryError);
}

TEST(Kasner, PencilOfOuterAndDiagonalConics) {
  const std::vector<std::pair<int, int>> cases{{7, 3}, {9, 2}, {9, 3}, {9, 4}, {11, 3}};
  for (const auto& [n, k] : cases) {
    const PencilRemarkReport r = pencil_remark_check(confocal_poncelet_polygon(kFamily, 0.0, n, 1), k);
    EXPECT_TRUE(r.passed) << n << "," << k;
    EXPECT_LT(r.rank_gap, 1e-8);
    EXPECT_EQ(r.negative_rank, 3);
    EXPECT_GT(r.negative_gap, 1e-4);
  }
}

TEST(Kasner, OuterTangentMeetsArePolesOfDiagonals) {
  const PonceletPolygon p = confocal_poncelet_polygon(kFamily, 0.0, 9, 1);
  const auto s = outer_tangent_meets(p, 3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const HomLine polar_line(p.pair.outer.matrix() * s[i].vec());
    EXPECT_TRUE(polar_line.equivalent(diagonal(p.polygon, static_cast<std::ptrdiff_t>(i), 3), 1e-9));
  }
}

TEST(Kasner, IteratedPentagramMapShrinksRegularPentagon) {
  const IterationOrbit o = iterate_map(regular_polygon(5), IterateOp::diagonal, 2, 4);
  ASSERT_EQ(o.polygons.size(), 5u);
  EXPECT_FALSE(o.truncated);
  for (std::size_t s = 1; s < o.diameters.size(); ++s) {
    EXPECT_NEAR(o.diameters[s] / o.diameters[s - 1], 1.0 / (kPhi * kPhi), 1e-10);
  }
  const IterationOrbit t = iterate_map(regular_polygon(5), IterateOp::tangency_then_diagonal, 2, 3);
  for (std::size_t s = 1; s < t.diameters.size(); ++s) {
    EXPECT_NEAR(t.diameters[s] / t.diameters[s - 1], 0.3090169944, 1e-9);
  }
}
