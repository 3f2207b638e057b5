#include "ghlab/sphere_curvature.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ghlab;

namespace {

// K from a central second difference of 1/phi evaluated through the full potential.
double fd_curvature(const MonopoleConfig& cfg, Chord ch, double mu) {
  const Vec3 p = cfg.position(ch.i), q = cfg.position(ch.j);
  const Vec3 mid = 0.5 * (p + q), e = (q - p).normalized();
  const double h = 1e-4 * 0.5 * (q - p).norm();
  auto inv = [&](double s) { return 1.0 / phi(cfg, mid + s * e); };
  return -0.5 * (inv(mu + h) - 2.0 * inv(mu) + inv(mu - h)) / (h * h);
}

MonopoleConfig random_config(std::mt19937_64& rng, int k, double min_s, double max_s) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), rad(min_s, max_s);
  std::vector<Vec3> pts{Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  while (static_cast<int>(pts.size()) < k) {
    Vec3 d(u(rng), u(rng), u(rng));
    if (d.norm() < 1e-3) continue;
    pts.push_back(rad(rng) * d.normalized());
  }
  return MonopoleConfig::finite(0.0, pts);
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto q = gauss_legendre(7);
  double s0 = 0, s12 = 0;
  for (const auto& [x, w] : q) {
    s0 += w;
    s12 += w * std::pow(x, 12);
  }
  EXPECT_NEAR(s0, 2.0, 1e-14);
  EXPECT_NEAR(s12, 2.0 / 13.0, 1e-14);
  const auto big = gauss_legendre(2000);
  double s = 0;
  for (const auto& [x, w] : big) s += w * std::cos(x);
  EXPECT_NEAR(s, 2.0 * std::sin(1.0), 1e-9);
}

TEST(SphereCurvature, TwoCentersGiveRoundSphere) {
  for (double a : {0.5, 1.0, 3.0}) {
    const auto cfg = MonopoleConfig::finite(0.0, {Vec3(-a, 0, 0), Vec3(a, 0, 0)});
    const auto prof = gauss_curvature(cfg, {0, 1});
    for (const auto& s : prof.samples) ASSERT_NEAR(s.K, 1.0 / a, 1e-8 / a) << s.mu;
    EXPECT_NEAR(prof.gauss_bonnet_integral, 4 * pi, 1e-6);
  }
}

TEST(SphereCurvature, MatchesFiniteDifferenceOfInversePotential) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto cfg = random_config(rng, 5, 1.2, 3.0);
    cfg.mass = 0.3 * trial;
    const auto prof = gauss_curvature(cfg, {0, 1}, 64);
    for (std::size_t i = 0; i < prof.samples.size(); i += 7) {
      const auto& s = prof.samples[i];
      if (std::abs(s.mu) > 0.95) continue;
      const double ref = fd_curvature(cfg, {0, 1}, s.mu);
      EXPECT_NEAR(s.K, ref, 1e-6 * std::max(1.0, std::abs(ref))) << trial << " " << s.mu;
      // The split reproduces d^2(1/phi) exactly.
      EXPECT_NEAR(-0.5 * (s.M + s.N), s.K, 1e-12 * std::max(1.0, std::abs(s.K)));
    }
  }
}

TEST(SphereCurvature, GaussBonnetHoldsForAnyConfiguration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    auto cfg = random_config(rng, 2 + trial, 1.1, 4.0);
    cfg.mass = 0.25 * trial;
    EXPECT_NEAR(gauss_curvature(cfg, {0, 1}).gauss_bonnet_integral, 4 * pi, 1e-3) << trial;
  }
  // Unequal endpoint charges: the integral is 2 pi (1/c_i + 1/c_j).
  auto cfg = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(0, 3, 0)});
  cfg.centers[1].charge = 2;
  const auto prof = gauss_curvature(cfg, {0, 1});
  EXPECT_NEAR(prof.gauss_bonnet_integral, two_pi * 1.5, 1e-3);
  EXPECT_TRUE(std::isnan(prof.samples.front().M));
}

TEST(SphereCurvature, CurvatureIsEndpointSymmetricAndChordOrderIndependent) {
  const auto cfg = MonopoleConfig::finite(
      0.5, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(0.3, 2.0, 0.4), Vec3(-2, -1, 1)});
  const auto p = gauss_curvature(cfg, {0, 1}, 100), q = gauss_curvature(cfg, {1, 0}, 100);
  for (std::size_t i = 0; i < p.samples.size(); ++i)
    EXPECT_NEAR(p.samples[i].K, q.samples[p.samples.size() - 1 - i].K, 1e-12);
}

TEST(SphereCurvature, RejectsBadChords) {
  const auto cfg = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(0.2, 0, 0)});
  try {
    gauss_curvature(cfg, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ChordThroughCenter);
  }
  EXPECT_THROW(gauss_curvature(cfg, {0, 0}), Error);
  EXPECT_THROW(gauss_curvature(cfg, {0, 5}), Error);
  EXPECT_THROW(gauss_curvature(MonopoleConfig::ooguri_vafa(10), {0, 0}), Error);
  // A center on the line but beyond an endpoint is allowed.
  const auto ok = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(3, 0, 0)});
  EXPECT_NO_THROW(gauss_curvature(ok, {0, 1}, 50));
}

TEST(TildePhi, GradientBoundAndOnAxisSecondDerivative) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cfg = random_config(rng, 4, 1.5, 3.0);
    for (double mu : {-0.9, -0.3, 0.0, 0.5, 0.8}) {
      const auto b = tilde_phi_bounds(cfg, {0, 1}, mu);
      EXPECT_TRUE(b.grad_bound_holds);
      EXPECT_GT(b.axis_second_deriv, 0.0);
    }
  }
  // Centers on the chord's line: the simple expression sum 1/r^3 is exact.
  const auto axis = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(5, 0, 0),
                                                 Vec3(-4, 0, 0)});
  const auto b = tilde_phi_bounds(axis, {0, 1}, 0.2);
  EXPECT_NEAR(b.second_deriv, b.axis_second_deriv, 1e-14);
  EXPECT_NEAR(b.axis_second_deriv, 1 / std::pow(4.8, 3) + 1 / std::pow(4.2, 3), 1e-15);
  // Off the line the exact value can be negative: a center above the midpoint.
  const auto off = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(0, 5, 0)});
  const auto c = tilde_phi_bounds(off, {0, 1}, 0.0);
  EXPECT_NEAR(c.second_deriv, -1.0 / (2 * 125.0), 1e-15);
  EXPECT_GT(c.axis_second_deriv, 0.0);
  EXPECT_THROW(tilde_phi_bounds(off, {0, 1}, 1.0), Error);
}

TEST(Positivity, ThresholdAndVacuousCase) {
  const auto two = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0)});
  const auto c2 = positivity_certificate(two, {0, 1});
  EXPECT_TRUE(std::isinf(c2.s));
  EXPECT_TRUE(c2.hypothesis_met);
  ASSERT_TRUE(c2.verified_positive.has_value());
  EXPECT_TRUE(*c2.verified_positive);

  const auto near = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(0, 3, 0)});
  const auto cn = positivity_certificate(near, {0, 1});
  EXPECT_DOUBLE_EQ(cn.s, 3.0);
  EXPECT_DOUBLE_EQ(cn.threshold, 4.0);
  EXPECT_FALSE(cn.hypothesis_met);
  EXPECT_FALSE(cn.verified_positive.has_value());

  // With 52 centers the threshold is sqrt(25) = 5.
  std::vector<Vec3> many{Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  for (int l = 0; l < 50; ++l) {
    const double t = two_pi * l / 50.0;
    many.emplace_back(0.0, 4.5 * std::cos(t), 4.5 * std::sin(t));
  }
  const auto cm = positivity_certificate(MonopoleConfig::finite(0.0, many), {0, 1});
  EXPECT_DOUBLE_EQ(cm.threshold, 5.0);
  EXPECT_FALSE(cm.hypothesis_met);
}

TEST(Positivity, HypothesisImpliesPositiveCurvature) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 3 + trial % 6;
    auto cfg = random_config(rng, k, 4.05, 9.0);
    cfg.mass = 0.5 * (trial % 3);
    const auto cert = positivity_certificate(cfg, {0, 1}, 400);
    ASSERT_TRUE(cert.hypothesis_met);
    ASSERT_TRUE(cert.verified_positive.value()) << trial;
    const auto prof = gauss_curvature(cfg, {0, 1}, 400);
    for (const auto& s : prof.samples) ASSERT_LT(s.N, 0.0) << trial << " " << s.mu;
  }
}

TEST(Positivity, CloseCenterCanMakeCurvatureNegative) {
  // A center right beside the chord pinches the sphere; the curvature turns negative there.
  const auto cfg = MonopoleConfig::finite(0.0, {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(0, 0.15, 0)});
  EXPECT_LT(gauss_curvature(cfg, {0, 1}).min_K, 0.0);
}
