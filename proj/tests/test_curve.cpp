#include "ghlab/curve.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ghlab;

namespace {

PolyCurve circle(double R, std::size_t n, double turns = 1.0, Vec2 center = Vec2::Zero()) {
  PolyCurve c;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = turns * two_pi * static_cast<double>(i) / static_cast<double>(n);
    c.nodes.push_back(center + R * Vec2(std::cos(t), std::sin(t)));
  }
  return c;
}

// Arc of the circle through (0,0) and (L,0) with the given sagitta, sampled by angle.
PolyCurve arc(double L, double sagitta, std::size_t n) {
  const double half = 0.5 * L;
  const double R = (half * half + sagitta * sagitta) / (2 * std::abs(sagitta));
  const double cy = sagitta > 0 ? sagitta - R : sagitta + R;
  const double a0 = std::atan2(0.0 - cy, 0.0 - half), a1 = std::atan2(0.0 - cy, L - half);
  double span = a1 - a0;
  if (sagitta > 0 && span > 0) span -= two_pi;
  if (sagitta < 0 && span < 0) span += two_pi;
  PolyCurve c;
  c.kind = OpenCurve{0, 1};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a0 + span * static_cast<double>(i) / static_cast<double>(n - 1);
    c.nodes.push_back(Vec2(half, cy) + R * Vec2(std::cos(t), std::sin(t)));
  }
  c.nodes.front() = Vec2(0, 0);
  c.nodes.back() = Vec2(L, 0);
  return c;
}

PolyCurve segment(Vec2 a, Vec2 b, std::size_t n) {
  PolyCurve c;
  c.kind = OpenCurve{0, 1};
  for (std::size_t i = 0; i < n; ++i)
    c.nodes.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  c.nodes.back() = b;
  return c;
}

MonopoleConfig pair(double L) {
  return MonopoleConfig::finite(0.0, {Vec3::Zero(), Vec3(L, 0, 0)});
}

}  // namespace

TEST(Curvature, CircleHasInverseRadius) {
  for (double R : {0.5, 1.0, 3.0}) {
    for (double k : curvature_profile(circle(R, 64))) EXPECT_NEAR(k, 1.0 / R, 1e-12 / R);
    // Clockwise traversal flips the sign.
    auto c = circle(R, 64);
    std::reverse(c.nodes.begin(), c.nodes.end());
    for (double k : curvature_profile(c)) EXPECT_NEAR(k, -1.0 / R, 1e-12 / R);
  }
}

TEST(Curvature, StraightSegmentIsExactlyFlat) {
  const auto c = segment(Vec2(0, 0), Vec2(4, 0), 17);
  for (double k : curvature_profile(c)) EXPECT_EQ(k, 0.0);
}

TEST(Curvature, TotalCurvatureOfSimpleClosedCurve) {
  // An ellipse sampled unevenly: the discrete integral still gives 2 pi up to O(h^2).
  for (std::size_t n : {100u, 400u}) {
    PolyCurve c;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = two_pi * i / n + 0.1 * std::sin(two_pi * i / n);
      c.nodes.emplace_back(2 * std::cos(t), std::sin(t));
    }
    const auto k = curvature_profile(c);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i)
      total += k[i] * 0.5 * ((c.node(i + 1) - c.node(i)).norm() + (c.node(i) - c.node(i + n - 1)).norm());
    EXPECT_NEAR(total, two_pi, 40.0 / (n * n));
  }
}

TEST(Curvature, DegenerateStencil) {
  PolyCurve c;
  c.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(0, 1)};
  try {
    curvature_profile(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateStencil);
  }
  PolyCurve two;
  two.kind = OpenCurve{};
  two.nodes = {Vec2(0, 0), Vec2(1, 0)};
  EXPECT_THROW(curvature_profile(two), Error);
}

TEST(Geometry, LengthAreaAndDiameter) {
  const auto s = segment(Vec2(0, 0), Vec2(2, 0), 9);
  EXPECT_NEAR(curve_length(s), 2.0, 1e-15);
  EXPECT_NEAR(surface_area(s), 4 * pi, 1e-14);
  EXPECT_NEAR(curve_diameter(circle(1.0, 64)), 2.0, 1e-15);
  // Regular n-gon perimeter.
  EXPECT_NEAR(curve_length(circle(1.0, 6)), 6.0, 1e-14);
}

TEST(Geometry, SelfIntersectionDetection) {
  PolyCurve bow;
  bow.nodes = {Vec2(0, 0), Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)};
  EXPECT_TRUE(find_self_intersection(bow).has_value());
  EXPECT_TRUE(is_embedded(circle(1.0, 50)));
  PolyCurve fold;
  fold.kind = OpenCurve{};
  fold.nodes = {Vec2(0, 0), Vec2(2, 0), Vec2(1, 0)};
  EXPECT_TRUE(find_self_intersection(fold).has_value());
  // A doubly traversed circle meets itself everywhere.
  EXPECT_FALSE(is_embedded(circle(1.0, 41, 2.0)));
}

TEST(Validation, OpenCurveEndpointsMustSitOnCenters) {
  const auto cfg = pair(4.0);
  auto c = arc(4.0, 1.0, 50);
  EXPECT_NO_THROW(validate_curve(c, cfg));
  c.nodes.back().x() += 1e-12;
  try {
    validate_curve(c, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
  pin_endpoints(c, cfg);
  EXPECT_NO_THROW(validate_curve(c, cfg));
  // Centers off the plane are rejected.
  const auto lifted = MonopoleConfig::finite(0.0, {Vec3::Zero(), Vec3(4, 0, 0.1)});
  EXPECT_THROW(validate_curve(c, lifted), Error);
  PolyCurve bow;
  bow.nodes = {Vec2(0, 0), Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)};
  try {
    validate_curve(bow, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SelfIntersection);
  }
}

TEST(Resampling, UniformSpacingAndFixedEnds) {
  auto c = arc(4.0, 1.5, 37);
  // Perturb spacing without leaving the circle.
  const auto r = resample_uniform(c, 101);
  ASSERT_EQ(r.size(), 101u);
  EXPECT_EQ(r.front(), c.front());
  EXPECT_EQ(r.back(), c.back());
  const double h = curve_length(r) / 100;
  for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR((r.node(i + 1) - r.node(i)).norm(), h, 2e-3 * h);
  const auto cl = resample_uniform(circle(1.0, 30), 45);
  EXPECT_EQ(cl.front(), circle(1.0, 30).front());
  EXPECT_EQ(cl.size(), 45u);
  EXPECT_TRUE(cl.closed());
}

TEST(Grading, StraightSegmentIsConstant) {
  for (double theta : {0.0, 0.4, -2.0, pi}) {
    const auto c = segment(Vec2(1, 1), Vec2(1, 1) + 2 * Vec2(std::cos(theta), std::sin(theta)), 11);
    const auto g = grading(c);
    for (double b : g.beta) EXPECT_NEAR(b, wrap_angle(theta), 1e-14);
    EXPECT_NEAR(g.variation, 0.0, 1e-14);
  }
}

TEST(Grading, TangentMatchesBeta) {
  const auto c = arc(4.0, 1.0, 200);
  const auto g = grading(c);
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    const Vec2 t = (c.nodes[i + 1] - c.nodes[i - 1]).normalized();
    EXPECT_NEAR(std::cos(g.beta[i]), t.x(), 1e-3);
    EXPECT_NEAR(std::sin(g.beta[i]), t.y(), 1e-3);
  }
  for (std::size_t i = 1; i < g.beta.size(); ++i) EXPECT_LT(std::abs(g.beta[i] - g.beta[i - 1]), pi);
}

TEST(Grading, IncrementIsCurvatureTimesArclengthToSecondOrder) {
  // A non-circular curve so the check is not trivially exact: y = 0.3 sin(x) on [0, pi].
  auto err = [](std::size_t n) {
    PolyCurve c;
    c.kind = OpenCurve{};
    for (std::size_t i = 0; i < n; ++i) {
      const double x = pi * i / (n - 1);
      c.nodes.emplace_back(x, 0.3 * std::sin(x));
    }
    const auto g = grading(c);
    const auto k = curvature_profile(c);
    double worst = 0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
      const double ds = (c.nodes[i + 1] - c.nodes[i]).norm();
      const double kmid = 0.5 * (k[i - 1] + k[i]);
      worst = std::max(worst, std::abs((g.beta[i + 1] - g.beta[i]) - kmid * ds));
    }
    return worst;
  };
  const double e1 = err(101), e2 = err(201);
  // Per-step defect is O(h^3); halving h should cut it by about 8 (at least 4 demanded).
  EXPECT_LT(e2, e1 / 4.0);
  EXPECT_LT(e1, 1e-4);
}

TEST(Grading, HalfCircleHasVariationPi) {
  const auto c = arc(2.0, 1.0, 201);
  const auto g = grading(c);
  EXPECT_NEAR(g.variation, pi, 1e-9);
  EXPECT_FALSE(almost_calibrated(c, 1e-3));
}

TEST(Grading, QuarterTurnArcIsAlmostCalibrated) {
  // Sagitta giving a tangent turn of pi/2: half-angle pi/4, sagitta = (L/2) tan(pi/8).
  const auto c = arc(2.0, std::tan(pi / 8), 201);
  EXPECT_NEAR(grading(c).variation, pi / 2, 1e-9);
  EXPECT_TRUE(almost_calibrated(c, pi / 4 * 0.999));
  EXPECT_TRUE(almost_calibrated(segment(Vec2(0, 0), Vec2(1, 0), 5), pi - 1e-9));
  EXPECT_THROW(almost_calibrated(c, 0.0), Error);
}

TEST(Maslov, SimpleLoopsAndDoubleLoop) {
  EXPECT_EQ(maslov_number(circle(1.0, 80)), 1);
  auto cw = circle(1.0, 80);
  std::reverse(cw.nodes.begin(), cw.nodes.end());
  EXPECT_EQ(maslov_number(cw), -1);
  const auto twice = circle(1.0, 161, 2.0);
  EXPECT_EQ(maslov_number(twice), 2);
  EXPECT_NEAR(grading(twice).total_turning, 4 * pi, 1e-9);
  EXPECT_EQ(maslov_number(arc(4.0, 1.0, 40)), 0);
}

TEST(Phase, DependsOnlyOnEndpoints) {
  auto c = segment(Vec2(0, 0), Vec2(1, 1), 9);
  EXPECT_NEAR(cohomological_phase(c), pi / 4, 1e-15);
  const double tau = cohomological_phase(arc(4.0, 1.0, 30));
  EXPECT_EQ(tau, 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 0.1);
  for (std::size_t i = 1; i + 1 < c.size(); ++i) c.nodes[i] += Vec2(g(rng), g(rng));
  EXPECT_EQ(cohomological_phase(c), pi / 4);
  PolyCurve loop;
  loop.kind = OpenCurve{};
  loop.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 0)};
  try {
    cohomological_phase(loop);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CoincidentEndpoints);
  }
}

TEST(Winding, CircleAroundAndBesidePoint) {
  const auto c = circle(1.0, 64);
  EXPECT_NEAR(winding_number(c.nodes, Vec2(0.2, 0.1)), 1.0, 1e-12);
  EXPECT_NEAR(winding_number(c.nodes, Vec2(3, 0)), 0.0, 1e-12);
  const auto a = arc(4.0, 1.0, 64);
  EXPECT_NEAR(std::abs(winding_number(loop_with_chord(a), Vec2(2, 0.5))), 1.0, 1e-12);
  EXPECT_NEAR(winding_number(loop_with_chord(a), Vec2(2, -0.5)), 0.0, 1e-12);
}
