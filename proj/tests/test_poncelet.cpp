#include <gtest/gtest.h>

#include <cmath>

#include "poncelet/poncelet.hpp"

using namespace poncelet;

namespace {

// Plain Poncelet iteration for axis-aligned ellipses, written without the
// library: tangent points come from the polar line in eccentric-angle form,
// the second chord endpoint from the quadratic on the outer ellipse.
struct PlainOrbit {
  Eigen::Vector2d end;
  double turned = 0.0;  // total polar angle swept about the origin
};

PlainOrbit plain_orbit(double oa, double ob, double ia, double ib, Eigen::Vector2d p, int steps) {
  PlainOrbit o;
  const Eigen::Vector2d d(1.0 / (oa * oa), 1.0 / (ob * ob));
  for (int s = 0; s < steps; ++s) {
    const double u = p.x() / ia;
    const double v = p.y() / ib;
    const double rho = std::hypot(u, v);
    const double t = std::atan2(v, u) + std::acos(1.0 / rho);
    const Eigen::Vector2d touch(ia * std::cos(t), ib * std::sin(t));
    const Eigen::Vector2d dir = touch - p;
    const double k = -2.0 * (p.cwiseProduct(d).dot(dir)) / dir.cwiseProduct(d).dot(dir);
    const Eigen::Vector2d q = p + k * dir;
    double da = std::atan2(q.y(), q.x()) - std::atan2(p.y(), p.x());
    while (da < 0) da += 2 * M_PI;
    o.turned += da;
    p = q;
  }
  o.end = p;
  return o;
}

}  // namespace

TEST(Poncelet, RegularPairCloses) {
  for (int n : {5, 7, 8}) {
    const PonceletPair pair = regular_pair(n);
    EXPECT_LT(closure_error(pair, ellipse_point(pair.outer, 0.3)), 1e-13) << n;
  }
  const PonceletPair star = regular_pair(7, 2);
  EXPECT_LT(closure_error(star, ellipse_point(star.outer, 0.3)), 1e-13);
}

TEST(Poncelet, ChordStepOnConcentricCirclesRotatesByTwoPiOverN) {
  const PonceletPair pair = regular_pair(9);
  const HomPoint p = HomPoint::from_xy({1, 0});
  const ChordStep s = chord_step(pair.outer, pair.inner, p);
  const Eigen::Vector2d q = s.next.xy();
  EXPECT_NEAR(std::atan2(q.y(), q.x()), 2 * M_PI / 9, 1e-14);
  EXPECT_NEAR(pair.inner.residual(s.touch), 0.0, 1e-14);
  EXPECT_NEAR(rotation_number(pair.outer, pair.inner, p, 90), 1.0 / 9.0, 1e-13);
}

TEST(Poncelet, TangentsFromExteriorInteriorAndOnConicPoints) {
  const Conic c = Conic::circle(1.0);
  const TangentPair ext = tangent_lines_from(c, HomPoint::from_xy({2, 0}));
  EXPECT_FALSE(ext.on_conic);
  for (const auto& l : ext.lines) {
    EXPECT_LT(c.dual_residual(l), 1e-14);
    EXPECT_NEAR(std::abs(incidence(l, HomPoint::from_xy({2, 0}))), 0.0, 1e-14);
  }
  EXPECT_TRUE(tangent_lines_from(c, HomPoint::from_xy({0, 1})).on_conic);
  try {
    (void)tangent_lines_from(c, HomPoint::from_xy({0.2, 0.1}));
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), Errc::PointInsideConic);
  }
}

TEST(Poncelet, ConfocalClosingParameterMatchesPlainIteration) {
  const ConfocalFamily f(4.0, 1.0);
  for (int n : {5, 7, 9, 11}) {
    const PonceletPair pair = find_closing_inner(f, 0.0, n, 1);
    ASSERT_TRUE(pair.confocal.has_value());
    const double lam = pair.confocal->lambda_inner;
    EXPECT_TRUE(f.is_ellipse_param(lam));
    EXPECT_LT(lam, 0.0);
    const Eigen::Vector2d start(2 * std::cos(1.0), std::sin(1.0));
    const PlainOrbit o = plain_orbit(2, 1, std::sqrt(4 + lam), std::sqrt(1 + lam), start, n);
    EXPECT_LT((o.end - start).norm(), 1e-9) << n;
    EXPECT_NEAR(o.turned, 2 * M_PI, 1e-6) << n;
  }
}

TEST(Poncelet, LargerNNeedsFatterInnerEllipse) {
  const ConfocalFamily f(4.0, 1.0);
  double prev = -1.0;
  for (int n : {5, 6, 7, 8, 9}) {
    const double lam = find_closing_inner(f, 0.0, n, 1).confocal->lambda_inner;
    EXPECT_GT(lam, prev);
    prev = lam;
  }
}

TEST(Poncelet, StarPolygonsClose) {
  const ConfocalFamily f(4.0, 1.0);
  const PonceletPolygon p = confocal_poncelet_polygon(f, 0.0, 7, 2);
  EXPECT_EQ(p.pair.winding, 2);
  EXPECT_LT(p.pair.closure_error, 1e-10);
  EXPECT_NO_THROW(validate(p));
}

TEST(Poncelet, BadShapesRejected) {
  const ConfocalFamily f(4.0, 1.0);
  EXPECT_THROW((void)find_closing_inner(f, 0.0, 4, 1), GeometryError);
  EXPECT_THROW((void)find_closing_inner(f, 0.0, 7, 0), GeometryError);
  EXPECT_THROW((void)find_closing_inner(f, 0.0, 6, 3), GeometryError);
}

TEST(Poncelet, BuiltPolygonIsInscribedAndCircumscribed) {
  const ConfocalFamily f(4.0, 1.0);
  const PonceletPolygon p = confocal_poncelet_polygon(f, 0.0, 9, 1);
  ASSERT_EQ(p.n(), 9u);
  for (std::size_t i = 0; i < p.n(); ++i) {
    EXPECT_LT(p.pair.outer.residual(p.polygon.vertex(static_cast<std::ptrdiff_t>(i))), 1e-12);
    EXPECT_LT(p.pair.inner.dual_residual(p.polygon.side(static_cast<std::ptrdiff_t>(i))), 1e-10);
  }
  EXPECT_TRUE(p.polygon.is_convex());
  EXPECT_GT(p.polygon.signed_area2(), 0.0);
}

TEST(Poncelet, PorismHoldsAndBreaksUnderPerturbation) {
  const ConfocalFamily f(4.0, 1.0);
  const PonceletPair pair = find_closing_inner(f, 0.0, 7, 1);
  EXPECT_LT(porism_check(pair, 20, 1).max_error, 1e-7);
  const PorismResult a = porism_check(pair, 10, 99);
  const PorismResult b = porism_check(pair, 10, 99);
  EXPECT_EQ(a.errors, b.errors);

  PonceletPair bent = pair;
  bent.inner = conic_at(f, pair.confocal->lambda_inner + 1e-3);
  EXPECT_GT(porism_check(bent, 5, 1).max_error, 1e-4);
}
