#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "poncelet/conics.hpp"
#include "poncelet/sampling.hpp"

using namespace poncelet;

namespace {

// x^2/a^2 + y^2/b^2 = 1 written out by hand
Vector6d ellipse_coeffs(double a, double b) {
  Vector6d v;
  v << 1.0 / (a * a), 0, 1.0 / (b * b), 0, 0, -1;
  return v;
}

double coeff_angle(const Vector6d& a, const Vector6d& b) {
  return 1.0 - std::abs(a.normalized().dot(b.normalized()));
}

}  // namespace

TEST(Conic, ThroughFivePointsOfAnEllipse) {
  std::array<HomPoint, 5> pts{HomPoint::from_xy({0, 0}), HomPoint::from_xy({0, 0}), HomPoint::from_xy({0, 0}),
                              HomPoint::from_xy({0, 0}), HomPoint::from_xy({0, 0})};
  for (int i = 0; i < 5; ++i) {
    const double t = 0.3 + 1.1 * i;
    pts[static_cast<std::size_t>(i)] = HomPoint::from_xy({3.0 * std::cos(t), 2.0 * std::sin(t)});
  }
  const Conic c = conic_through_points(pts);
  EXPECT_LT(coeff_angle(c.coefficients(), ellipse_coeffs(3, 2)), 1e-14);
  EXPECT_EQ(classify(c), ConicClass::real_ellipse);
  EXPECT_NEAR(c.matrix().norm(), 1.0, 1e-14);
}

TEST(Conic, ThreeCollinearPointsAreRejected) {
  const std::array<HomPoint, 5> pts{HomPoint::from_xy({0, 0}), HomPoint::from_xy({1, 1}), HomPoint::from_xy({2, 2}),
                                    HomPoint::from_xy({3, 3}), HomPoint::from_xy({0, 1})};
  EXPECT_THROW((void)conic_through_points(pts), GeometryError);
}

TEST(Conic, Classification) {
  EXPECT_EQ(classify(Conic::circle(2.0)), ConicClass::real_ellipse);
  EXPECT_EQ(classify(Conic::diagonal(1, -1, -1)), ConicClass::hyperbola);
  EXPECT_EQ(classify(Conic::diagonal(1, 1, 1)), ConicClass::imaginary_ellipse);
  EXPECT_EQ(classify(Conic::diagonal(1, -1, 0)), ConicClass::degenerate);
  Vector6d parabola;
  parabola << 1, 0, 0, 0, -1, 0;  // x^2 = y
  EXPECT_EQ(classify(Conic::from_coefficients(parabola)), ConicClass::parabola);
}

TEST(Conic, FitResidualSeparatesExactFromNoisy) {
  std::mt19937_64 rng(5);
  const EllipseShape e = random_ellipse(rng);
  std::vector<HomPoint> pts;
  for (int i = 0; i < 12; ++i) pts.push_back(HomPoint::from_xy(e.at(0.5 * i)));
  EXPECT_LT(fit_conic(pts).residual, 1e-12);
  pts[4] = HomPoint::from_xy(pts[4].xy() + Eigen::Vector2d(1e-3, 0));
  EXPECT_GT(fit_conic(pts).residual, 1e-5);
}

TEST(Conic, LineMeetsUnitCircle) {
  const Conic c = Conic::circle(1.0);
  const LineIntersection hit = intersect_conic_line(c, HomLine(Eigen::Vector3d(0, 1, 0)));
  ASSERT_EQ(hit.points.size(), 2u);
  EXPECT_NEAR(std::abs(hit.points[0].xy().x()), 1.0, 1e-15);
  EXPECT_NEAR(hit.points[0].xy().x() + hit.points[1].xy().x(), 0.0, 1e-15);

  // the line x + y = 1 meets the circle at (1,0) and (0,1)
  const LineIntersection diag = intersect_conic_line(c, HomLine(Eigen::Vector3d(1, 1, -1)));
  ASSERT_EQ(diag.points.size(), 2u);
  for (const auto& p : diag.points) EXPECT_NEAR(p.xy().x() * p.xy().y(), 0.0, 1e-15);

  EXPECT_TRUE(intersect_conic_line(c, HomLine(Eigen::Vector3d(0, 1, -2))).points.empty());
}

TEST(Conic, TangentLineAndTangencyPointAreInverse) {
  const Conic c = Conic::from_coefficients(ellipse_coeffs(3, 2));
  for (int i = 0; i < 16; ++i) {
    const double t = 0.4 * i;
    const HomPoint p = HomPoint::from_xy({3 * std::cos(t), 2 * std::sin(t)});
    const HomLine l = tangent_line_at(c, p);
    // oracle: tangent to x^2/9 + y^2/4 = 1 at (x0,y0) is x x0/9 + y y0/4 = 1
    const HomLine oracle(Eigen::Vector3d(p.xy().x() / 9, p.xy().y() / 4, -1));
    EXPECT_TRUE(l.equivalent(oracle, 1e-12));
    EXPECT_LT(c.dual_residual(l), 1e-12);
    EXPECT_TRUE(tangency_point(c, l).equivalent(p, 1e-10));
  }
  EXPECT_THROW((void)tangent_line_at(c, HomPoint::from_xy({0, 0})), GeometryError);
}

TEST(Conic, InscribedInFiveTangents) {
  std::array<HomLine, 5> lines{HomLine(Eigen::Vector3d(1, 0, 1)), HomLine(Eigen::Vector3d(1, 0, 1)),
                               HomLine(Eigen::Vector3d(1, 0, 1)), HomLine(Eigen::Vector3d(1, 0, 1)),
                               HomLine(Eigen::Vector3d(1, 0, 1))};
  for (int i = 0; i < 5; ++i) {
    const double t = 0.1 + 1.2 * i;
    lines[static_cast<std::size_t>(i)] = HomLine(Eigen::Vector3d(std::cos(t), std::sin(t), -2.0));
  }
  EXPECT_LT(coeff_angle(conic_tangent_to_lines(lines).coefficients(), Conic::circle(2.0).coefficients()), 1e-14);
}

TEST(Conic, DualOfDualIsTheConic) {
  const Conic c = Conic::from_coefficients(ellipse_coeffs(3, 2));
  EXPECT_LT(dual(dual(c)).distance(c), 1e-14);
}

TEST(Conic, TransformMovesPointsAlong) {
  std::mt19937_64 rng(2);
  const EllipseShape e = random_ellipse(rng);
  std::vector<HomPoint> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(HomPoint::from_xy(e.at(0.7 * i)));
  const Conic c = fit_conic(pts).conic;
  Eigen::Matrix3d m;
  m << 1.2, 0.3, 0.1, -0.2, 0.9, 0.4, 0.05, 0.02, 1.0;
  const ProjMap h(m);
  const Conic ch = c.transformed(h);
  for (const auto& p : pts) EXPECT_LT(ch.residual(h.apply(p)), 1e-12);
}

TEST(Pencil, RankOfCombinationsAndGenericTriples) {
  const Conic a = Conic::circle(1.0);
  const Conic b = Conic::from_coefficients(ellipse_coeffs(3, 2));
  const Conic ab = Conic::from_coefficients(0.3 * a.coefficients() - 1.7 * b.coefficients());
  const std::array<Conic, 3> in{a, b, ab};
  const PencilRank r = pencil_rank(in);
  EXPECT_EQ(r.rank, 2);
  EXPECT_LT(pencil_gap(in), 1e-14);

  Vector6d h;
  h << 1, 0.2, -1, 0.3, 0.1, -1;
  const std::array<Conic, 3> out{a, b, Conic::from_coefficients(h)};
  EXPECT_EQ(pencil_rank(out).rank, 3);
  EXPECT_GT(pencil_gap(out), 1e-3);
}
