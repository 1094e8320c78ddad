#include <gtest/gtest.h>

#include <cmath>

#include "poncelet/confocal.hpp"

using namespace poncelet;

TEST(Confocal, RejectsBadParameters) {
  EXPECT_THROW(ConfocalFamily(1.0, 4.0), GeometryError);
  EXPECT_THROW(ConfocalFamily(1.0, 1.0), GeometryError);
  EXPECT_THROW(ConfocalFamily(4.0, 0.0), GeometryError);
}

TEST(Confocal, MembersShareFoci) {
  const ConfocalFamily f(4.0, 1.0);
  EXPECT_NEAR(f.focal(), std::sqrt(3.0), 1e-15);
  // sum of focal distances of an ellipse point is 2 sqrt(a2 + lambda)
  for (double lam : {-0.5, 0.0, 2.0}) {
    const double a = std::sqrt(4.0 + lam);
    const double b = std::sqrt(1.0 + lam);
    const Eigen::Vector2d p(a * std::cos(0.7), b * std::sin(0.7));
    const Eigen::Vector2d f1(std::sqrt(3.0), 0);
    EXPECT_NEAR((p - f1).norm() + (p + f1).norm(), 2 * a, 1e-13);
    EXPECT_LT(conic_at(f, lam).residual(HomPoint::from_xy(p)), 1e-14);
  }
  EXPECT_EQ(classify(conic_at(f, -2.0)), ConicClass::hyperbola);
  EXPECT_EQ(classify(conic_at(f, 0.5)), ConicClass::real_ellipse);
}

TEST(Confocal, TwoParametersThroughEveryPoint) {
  const ConfocalFamily f(4.0, 1.0);
  const Eigen::Vector2d p(1.3, 0.6);
  const auto lam = params_through_point(f, p);
  ASSERT_EQ(lam.size(), 2u);
  EXPECT_TRUE(f.is_hyperbola_param(lam[0]));
  EXPECT_TRUE(f.is_ellipse_param(lam[1]));
  for (double l : lam) {
    EXPECT_NEAR(p.x() * p.x() / (4 + l) + p.y() * p.y() / (1 + l), 1.0, 1e-13);
  }
  EXPECT_DOUBLE_EQ(ellipse_param(f, p), lam[1]);
  EXPECT_DOUBLE_EQ(hyperbola_param(f, p), lam[0]);
}

TEST(Confocal, TransportCarriesEllipseToEllipse) {
  const ConfocalFamily f(4.0, 1.0);
  for (int sign : {1, -1}) {
    const ProjMap a = transport_map(f, -0.3, 0.8, sign);
    for (int i = 0; i < 12; ++i) {
      const double t = 0.5 * i;
      const HomPoint p = HomPoint::from_xy({std::sqrt(3.7) * std::cos(t), std::sqrt(0.7) * std::sin(t)});
      EXPECT_LT(conic_at(f, 0.8).residual(a.apply(p)), 1e-14);
    }
  }
  EXPECT_LT(transport_map(f, 0.2, 0.2, 1).distance(ProjMap(Eigen::Matrix3d::Identity())), 1e-15);
}

TEST(Confocal, TransportPreservesTheCrossingHyperbolaParameter) {
  // Points with the same eccentric angle on two confocal ellipses lie on one
  // confocal hyperbola.
  const ConfocalFamily f(4.0, 1.0);
  const ProjMap a = transport_map(f, 0.0, 1.5, 1);
  const Eigen::Vector2d p(2 * std::cos(1.1), std::sin(1.1));
  const Eigen::Vector2d q = a.apply(HomPoint::from_xy(p)).xy();
  EXPECT_NEAR(hyperbola_param(f, p), hyperbola_param(f, q), 1e-12);
}
