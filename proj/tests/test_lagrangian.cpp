#include "ghlab/curated.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ghlab;

namespace {

const Vec2 P1(0, 0), P2(4, 0);

MonopoleConfig planar(const std::vector<Vec2>& pts) { return detail::planar_config(pts); }

template <class F>
ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

// Polyline through the given waypoints, densified so every edge is short.
PolyCurve polyline(const std::vector<Vec2>& way, int per_edge = 20) {
  PolyCurve c;
  c.kind = OpenCurve{0, 1};
  for (std::size_t i = 0; i + 1 < way.size(); ++i)
    for (int k = 0; k < per_edge; ++k) c.nodes.push_back(way[i] + (way[i + 1] - way[i]) * (double(k) / per_edge));
  c.nodes.push_back(way.back());
  return c;
}

}  // namespace

// --------------------------------------------------------------------------------------------

TEST(LagrangianDefect, PlanarCurveOrthogonalToV) {
  std::vector<Vec3> c;
  for (int i = 0; i < 50; ++i) c.emplace_back(std::cos(0.1 * i), std::sin(0.3 * i), 2.0);
  EXPECT_EQ(lagrangian_defect(c, Vec3::UnitZ()), 0.0);
  EXPECT_NEAR(lagrangian_defect({Vec3::Zero(), Vec3(0, 0, 3)}, Vec3::UnitZ()), 1.0, 1e-15);
}

TEST(LagrangianDefect, HelixMatchesChordSlope) {
  const double pitch = 0.3;
  std::vector<Vec3> h;
  const int n = 100;
  const double dt = 4 * pi / (n - 1);
  for (int i = 0; i < n; ++i) h.emplace_back(std::cos(i * dt), std::sin(i * dt), pitch * i * dt);
  // Each chord has rise pitch * dt over length sqrt((2 sin(dt/2))^2 + (pitch dt)^2).
  const double rise = pitch * dt;
  const double expected = rise / std::hypot(2 * std::sin(dt / 2), rise);
  EXPECT_NEAR(lagrangian_defect(h, Vec3::UnitZ()), expected, 1e-13);
  EXPECT_NEAR(expected, pitch / std::sqrt(1 + pitch * pitch), 1e-3);
  EXPECT_GT(lagrangian_defect(h, Vec3::UnitZ()), 0.0);
}

TEST(LagrangianDirections, AxisAlignedPair) {
  const auto d = lagrangian_directions(Vec3::Zero(), Vec3(0, 0, 2));
  EXPECT_TRUE(d.admits(Vec3::UnitX()));
  EXPECT_FALSE(d.admits(Vec3::UnitZ()));
  for (const auto& v : d.sample(12)) {
    EXPECT_EQ(LagrangianDirections::period(Vec3::Zero(), Vec3(0, 0, 2), v), 0.0);
    EXPECT_NEAR(v.norm(), 1.0, 1e-15);
  }
  EXPECT_EQ(error_of([] { lagrangian_directions(Vec3(1, 2, 3), Vec3(1, 2, 3)); }),
            ErrorKind::CoincidentPoints);
}

TEST(LagrangianDirections, RandomPairsSampleOrthogonally) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
    const auto d = lagrangian_directions(a, b);
    for (const auto& v : d.sample(16)) {
      EXPECT_LT(std::abs(v.dot(b - a)), 1e-12 * std::max(1.0, (b - a).norm()));
      EXPECT_LT(std::abs(LagrangianDirections::period(a, b, v)), 1e-11);
    }
  }
}

// --------------------------------------------------------------------------------------------

TEST(HomotopyWord, ChordIsEmpty) {
  const auto cfg = planar({P1, P2, Vec2(2, 0.5), Vec2(1, -1)});
  const auto w = homotopy_word(cfg, circular_arc(P1, P2, 0.0, 30, {0, 1}));
  EXPECT_TRUE(w.trivial());
}

TEST(HomotopyWord, ArcOverOneCenterGivesOneLetter) {
  const auto cfg = planar({P1, P2, Vec2(2, 0.5)});
  for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
    const auto w = homotopy_word(cfg, circular_arc(P1, P2, 2.0, 101, {0, 1}), seed);
    ASSERT_EQ(w.letters.size(), 1u);
    EXPECT_EQ(w.letters[0].center, 2);
    // The arc above the chord runs clockwise around the center.
    EXPECT_EQ(w.letters[0].sign, -1);
  }
  const auto below = circular_arc(P1, P2, -2.0, 101, {0, 1});
  EXPECT_TRUE(homotopy_word(cfg, below).trivial());
}

TEST(HomotopyWord, ExponentSumsMatchWindingNumbers) {
  const auto cfg = planar({P1, P2, Vec2(2.5, 0.8), Vec2(2.5, -0.8), Vec2(1, 0.3)});
  const auto c = commutator_arc();
  const auto loop = loop_with_chord(c);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto w = homotopy_word(cfg, c, seed);
    for (int q : {2, 3, 4})
      EXPECT_EQ(w.exponent_sum(q),
                std::lround(winding_number(loop, cfg.position(q).head<2>())));
    for (std::size_t i = 1; i < w.letters.size(); ++i)
      EXPECT_FALSE(w.letters[i].center == w.letters[i - 1].center &&
                   w.letters[i].sign == -w.letters[i - 1].sign);
  }
}

TEST(HomotopyWord, CommutatorArcIsNontrivialWithZeroWinding) {
  // Winding numbers miss this arc: both are zero yet the word is a commutator.
  const auto cfg = planar({P1, P2, Vec2(2.5, 0.8), Vec2(2.5, -0.8)});
  const auto c = commutator_arc();
  ASSERT_TRUE(is_embedded(c));
  const auto loop = loop_with_chord(c);
  EXPECT_NEAR(winding_number(loop, Vec2(2.5, 0.8)), 0.0, 1e-9);
  EXPECT_NEAR(winding_number(loop, Vec2(2.5, -0.8)), 0.0, 1e-9);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto w = homotopy_word(cfg, c, seed);
    EXPECT_FALSE(w.trivial());
    EXPECT_EQ(w.exponent_sum(2), 0);
    EXPECT_EQ(w.exponent_sum(3), 0);
    EXPECT_GE(w.letters.size(), 4u);
  }
}

TEST(HomotopyWord, HandTracedCrossings) {
  // From p1 the arc climbs over both stacked centers, comes back down between them, turns
  // under the lower one and leaves for p2. The seed only picks the ray direction, so the oracle
  // is the crossing sequence for the direction actually used.
  const Vec2 up(2, 1), down(2, -1);
  const auto cfg = planar({P1, P2, up, down});
  const auto c = polyline({P1, Vec2(1, 2), Vec2(3, 2), Vec2(3, 0.3), Vec2(1.5, 0.3),
                           Vec2(1.5, -2), Vec2(3.5, -2), P2});
  ASSERT_TRUE(is_embedded(c));
  const auto w = homotopy_word(cfg, c, 11);
  const Vec2 d(std::cos(w.ray_angle), std::sin(w.ray_angle));
  // Independent oracle: brute-force crossing list over the loop, then free reduction.
  std::vector<HomotopyLetter> raw;
  const auto loop = loop_with_chord(c);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 a = loop[i], b = loop[(i + 1) % loop.size()];
    std::vector<std::pair<double, HomotopyLetter>> hits;
    for (int q : {2, 3}) {
      const Vec2 p = cfg.position(q).head<2>();
      // Intersect via parametric solve with Eigen.
      Eigen::Matrix2d A;
      A << b - a, -d;
      const Vec2 st = A.colPivHouseholderQr().solve(p - a);
      if (st[0] >= 0 && st[0] < 1 && st[1] >= 0)
        hits.push_back({st[0], {q, cross2(d, b - a) > 0 ? 1 : -1}});
    }
    std::sort(hits.begin(), hits.end(), [](auto& x, auto& y) { return x.first < y.first; });
    for (auto& h : hits) raw.push_back(h.second);
  }
  std::vector<HomotopyLetter> reduced;
  for (const auto& l : raw) {
    if (!reduced.empty() && reduced.back().center == l.center && reduced.back().sign == -l.sign)
      reduced.pop_back();
    else
      reduced.push_back(l);
  }
  EXPECT_EQ(w.letters, reduced);
  for (int q : {2, 3})
    EXPECT_EQ(w.exponent_sum(q), std::lround(winding_number(loop, cfg.position(q).head<2>())));
  EXPECT_FALSE(w.trivial());
}

TEST(ThomasStability, TwoCentersAlwaysStable) {
  const auto cfg = planar({P1, P2});
  for (double s : {-3.0, -0.5, 0.0, 1.0, 2.0, 5.0})
    EXPECT_TRUE(thomas_stable(cfg, circular_arc(P1, P2, s, 121, {0, 1})).stable);
  EXPECT_TRUE(thomas_stable(cfg, commutator_arc()).stable);
}

TEST(ThomasStability, EnclosedThirdCenterIsWitness) {
  const auto cfg = planar({P1, P2, Vec2(2, 0.5)});
  const auto v = thomas_stable(cfg, circular_arc(P1, P2, 1.0, 121, {0, 1}));
  EXPECT_FALSE(v.stable);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(*v.witness, 2);
  EXPECT_TRUE(thomas_stable(cfg, circular_arc(P1, P2, 0.3, 121, {0, 1})).stable);
}

TEST(ThomasStability, CentersOffThePlaneAreIgnored) {
  const auto cfg = MonopoleConfig::finite(0.0, {Vec3(0, 0, 0), Vec3(4, 0, 0), Vec3(2, 0.5, 0.2)});
  EXPECT_TRUE(thomas_stable(cfg, circular_arc(P1, P2, 1.0, 121, {0, 1})).stable);
}

// --------------------------------------------------------------------------------------------

TEST(FlowStability, TwoCentersVacuous) {
  const auto v = flow_stable(planar({P1, P2}), circular_arc(P1, P2, 1.5, 121, {0, 1}));
  EXPECT_TRUE(v.stable);
  EXPECT_TRUE(v.candidates.empty());
}

TEST(FlowStability, ArcOverCenterFailsBothConditions) {
  const Vec2 q(2, 0.5);
  const auto c = circular_arc(P1, P2, 2.0 * std::tan(0.3), 401, {0, 1});
  const auto v = flow_stable(planar({P1, P2, q}), c);
  EXPECT_NEAR(v.inf_beta, -0.6, 1e-9);
  EXPECT_NEAR(v.sup_beta, 0.6, 1e-9);
  EXPECT_FALSE(v.stable);
  ASSERT_TRUE(v.witness.has_value());
  const auto& d = *v.witness;
  EXPECT_EQ(d.split_index, 2);
  EXPECT_NEAR(d.chord_angles[0], std::atan2(0.5, 2.0), 1e-15);
  EXPECT_NEAR(d.chord_angles[1], std::atan2(-0.5, 2.0), 1e-15);
  EXPECT_NEAR(d.chord_lengths[0] + d.chord_lengths[1], 2 * std::hypot(2.0, 0.5), 1e-14);
  EXPECT_FALSE(d.condition_a);
  EXPECT_FALSE(d.condition_b);
  // Arc length 2 R (0.6) with R = 2 / sin 0.6.
  EXPECT_NEAR(v.length, 2 * (2 / std::sin(0.6)) * 0.6, 1e-4);
  EXPECT_GT(v.length, 2 * std::hypot(2.0, 0.5));
}

TEST(FlowStability, FlatterArcNoLongerEnclosesTheCenter) {
  // Any arc enclosing q is at least as long as the path through q, so (b) cannot rescue an
  // enclosing arc; flattening instead releases q and leaves nothing to test.
  const auto c = circular_arc(P1, P2, 0.3, 201, {0, 1});
  const auto v = flow_stable(planar({P1, P2, Vec2(2, 0.5)}), c);
  EXPECT_TRUE(v.stable);
  EXPECT_TRUE(v.candidates.empty());
  EXPECT_LT(v.length, 2 * std::hypot(2.0, 0.5));
}

TEST(FlowStability, EnclosedCentersNeverPassEitherCondition) {
  // With tangent directions in a cone of width < pi, every point of the arc and of the region it
  // cuts off lies in p1 + cone and in p2 - cone, so the chord angles of an enclosed center sit
  // inside the grading range; and the shortest path around q is p1 -> q -> p2. Random arcs with
  // random enclosed centers confirm that neither (a) nor (b) ever holds.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> us(-1.9, 1.9), ut(0.05, 0.95), uf(0.1, 0.9);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Bumpy arcs: a circular arc plus a small sine wiggle.
    const double sag = us(rng);
    if (std::abs(sag) < 0.2) continue;
    auto c = circular_arc(P1, P2, sag, 301, {0, 1});
    const double amp = 0.05 * uf(rng);
    for (std::size_t i = 1; i + 1 < c.size(); ++i)
      c.nodes[i].y() += amp * std::sin(3 * pi * c.nodes[i].x() / 4.0);
    if (!is_embedded(c) || grading(c).variation >= pi) continue;
    const double x = 4 * ut(rng);
    const double y = (sag > 0 ? 1 : -1) * uf(rng) * std::abs(sag);
    const Vec2 q(x, y);
    if (std::abs(winding_number(loop_with_chord(c), q)) < 0.5) continue;
    const auto v = flow_stable(planar({P1, P2, q}), c);
    ASSERT_EQ(v.candidates.size(), 1u);
    EXPECT_FALSE(v.candidates[0].condition_a);
    EXPECT_FALSE(v.candidates[0].condition_b);
    ++tested;
  }
  EXPECT_GT(tested, 40);
}

TEST(FlowStability, ConditionArithmetic) {
  // The two predicates on their own, away from any curve.
  const auto a = decomposition_conditions(Vec2(0, 0), Vec2(4, 0), Vec2(0.1, 0.3), -0.2, 0.5, 4.5);
  EXPECT_TRUE(a.condition_a);  // atan2(0.3, 0.1) > 0.5
  EXPECT_FALSE(a.condition_b);
  const auto b = decomposition_conditions(Vec2(0, 0), Vec2(4, 0), Vec2(2, 0.5), -0.6, 0.6, 4.1);
  EXPECT_FALSE(b.condition_a);
  EXPECT_TRUE(b.condition_b);  // 4.1 < 2 sqrt(4.25)
  // Equality in (b) does not pass; the inequality is strict.
  const double exact = 2 * std::hypot(2.0, 0.5);
  EXPECT_FALSE(decomposition_conditions(Vec2(0, 0), Vec2(4, 0), Vec2(2, 0.5), -0.6, 0.6, exact)
                   .condition_b);
  // A chord angle exactly on the range boundary is not inside the open interval.
  const double edge = std::atan2(0.5, 2.0);
  EXPECT_TRUE(
      decomposition_conditions(Vec2(0, 0), Vec2(4, 0), Vec2(2, 0.5), -0.6, edge, 9.0).condition_a);
}

TEST(FlowStability, RefusesArcsThatAreNotAlmostCalibrated) {
  const auto cfg = planar({P1, P2, Vec2(2, 0.5)});
  EXPECT_EQ(error_of([&] { flow_stable(cfg, circular_arc(P1, P2, 2.5, 201, {0, 1})); }),
            ErrorKind::NotAlmostCalibrated);
}

TEST(FlowStability, TiltedChordUsesRelativeAngles) {
  // Rotating the whole picture leaves every verdict and relative angle unchanged.
  const double rot = 2.3;
  const Eigen::Rotation2Dd R(rot);
  const Vec2 a = R * P1, b = R * P2, q = R * Vec2(2, 0.5);
  const auto c = circular_arc(a, b, 2.0 * std::tan(0.3), 401, {0, 1});
  const auto v = flow_stable(planar({a, b, q}), c);
  EXPECT_NEAR(v.inf_beta, -0.6, 1e-9);
  EXPECT_NEAR(v.sup_beta, 0.6, 1e-9);
  EXPECT_FALSE(v.stable);
  EXPECT_NEAR(v.witness->chord_angles[0], std::atan2(0.5, 2.0), 1e-12);
}

TEST(CuratedScenarios, VerdictsMatchLabels) {
  const auto all = curated_scenarios();
  ASSERT_GE(all.size(), 6u);
  for (const auto& s : all) {
    SCOPED_TRACE(s.name);
    ASSERT_NO_THROW(validate_curve(s.curve, s.config));
    const auto th = thomas_stable(s.config, s.curve);
    EXPECT_EQ(th.stable, s.thomas_stable);
    EXPECT_EQ(th.stable, th.word.trivial());
    if (s.witness) {
      EXPECT_EQ(th.witness, s.witness);
    }
    switch (s.flow) {
      case FlowExpectation::NotAlmostCalibrated:
        EXPECT_EQ(error_of([&] { flow_stable(s.config, s.curve); }),
                  ErrorKind::NotAlmostCalibrated);
        break;
      case FlowExpectation::Stable:
      case FlowExpectation::Unstable: {
        const auto fl = flow_stable(s.config, s.curve);
        EXPECT_EQ(fl.stable, s.flow == FlowExpectation::Stable);
        // Flow stability implies Thomas stability.
        if (fl.stable) {
          EXPECT_TRUE(th.stable);
        }
      }
    }
  }
}

// --------------------------------------------------------------------------------------------

TEST(JordanHolder, NoEnclosedCentersGivesTheChord) {
  const auto j = jordan_holder(planar({P1, P2, Vec2(2, -1)}), circular_arc(P1, P2, 1.0, 81, {0, 1}));
  ASSERT_EQ(j.chain.size(), 1u);
  EXPECT_EQ(j.chain[0].from, P1);
  EXPECT_EQ(j.chain[0].to, P2);
  EXPECT_EQ(j.chain[0].tau, 0.0);
}

TEST(JordanHolder, TwoEnclosedCenters) {
  const auto cfg = planar({P1, P2, Vec2(1, 1), Vec2(3, 1), Vec2(2, 0.8)});
  const auto j = jordan_holder(cfg, circular_arc(P1, P2, 1.8, 201, {0, 1}));
  EXPECT_FALSE(j.reversed);
  ASSERT_EQ(j.chain.size(), 3u);  // (2, 0.8) is inside the hull and drops out
  EXPECT_EQ(j.chain[0].to_center, 2);
  EXPECT_EQ(j.chain[1].to_center, 3);
  EXPECT_NEAR(j.chain[0].tau, pi / 4, 1e-15);
  EXPECT_NEAR(j.chain[1].tau, 0.0, 1e-15);
  EXPECT_NEAR(j.chain[2].tau, -pi / 4, 1e-15);
  EXPECT_TRUE(j.monotone);
}

TEST(JordanHolder, ArcBelowIsBuiltForTheReversedOrientation) {
  const auto cfg = planar({P1, P2, Vec2(1, -1), Vec2(3, -1)});
  const auto j = jordan_holder(cfg, circular_arc(P1, P2, -1.8, 201, {0, 1}));
  EXPECT_TRUE(j.reversed);
  ASSERT_EQ(j.chain.size(), 3u);
  EXPECT_EQ(j.chain.front().from, P2);
  EXPECT_EQ(j.chain.back().to, P1);
  EXPECT_NEAR(j.chain[0].tau, pi / 4, 1e-15);
  EXPECT_NEAR(j.chain[2].tau, -pi / 4, 1e-15);
  EXPECT_TRUE(j.monotone);
}

TEST(JordanHolder, InflectedCurveIsRefused) {
  PolyCurve s;
  s.kind = OpenCurve{0, 1};
  for (int i = 0; i <= 100; ++i) s.nodes.emplace_back(0.04 * i, 0.5 * std::sin(two_pi * 0.04 * i / 4.0));
  s.nodes.back() = P2;
  s.nodes.front() = P1;
  EXPECT_EQ(error_of([&] { jordan_holder(planar({P1, P2}), s); }), ErrorKind::NotPerfectMorse);
}

TEST(JordanHolder, RandomConvexChainsAreMonotone) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0.2, 3.8), uy(0.05, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts{P1, P2};
    for (int i = 0; i < 5; ++i) pts.emplace_back(ux(rng), uy(rng));
    const auto j = jordan_holder(planar(pts), circular_arc(P1, P2, 2.6, 301, {0, 1}));
    EXPECT_TRUE(j.monotone);
    EXPECT_EQ(j.chain.front().from, P1);
    EXPECT_EQ(j.chain.back().to, P2);
  }
}

// --------------------------------------------------------------------------------------------

TEST(Seidel, SpiralCrossingCounts) {
  const Vec2 q0(0, 0), q1(1, 0), q2(-0.3, 1.6);
  for (int r : {0, 1, 2, 3}) {
    const auto c = seidel_spiral(q0, q1, q2, r);
    EXPECT_TRUE(is_embedded(c));
    int cross_l2 = 0, cross_inf = 0, cross_l1 = 0;
    const Vec2 far = q1 + 100.0 * (q1 - q0);
    for (std::size_t i = 0; i + 2 < c.size(); ++i) {
      const Vec2 a = c.nodes[i], b = c.nodes[i + 1];
      cross_l2 += geom::segments_intersect(a, b, q0, q2);
      cross_inf += i > 0 && geom::segments_intersect(a, b, q1, far);
      cross_l1 += i > 0 && geom::segments_intersect(a, b, q0, q1);
    }
    EXPECT_EQ(cross_l2, r);
    EXPECT_EQ(cross_inf, r);
    EXPECT_EQ(cross_l1, 0);
  }
}

TEST(Seidel, InvariantCountsRelativeTurns) {
  const Vec2 q0(0, 0), q1(1, 0), q2(-0.3, 1.6);
  const auto g1 = seidel_spiral(q0, q1, q2, 1), g2 = seidel_spiral(q0, q1, q2, 2),
             g3 = seidel_spiral(q0, q1, q2, 3);
  const Vec3 p0 = Vec3::Zero();
  EXPECT_EQ(seidel_invariant(g1, g1, p0), 0);
  EXPECT_EQ(seidel_invariant(g1, g2, p0), -1);
  EXPECT_EQ(seidel_invariant(g3, g1, p0), 2);
  EXPECT_EQ(seidel_invariant(g1, g3, p0), -2);
  EXPECT_EQ(error_of([&] { seidel_invariant(g1, circular_arc(q1, Vec2(5, 5), 0.0, 9), p0); }),
            ErrorKind::InvalidInput);
}

TEST(Seidel, SpiralsAreThomasUnstable) {
  const Vec2 q0(0, 0), q1(1, 0), q2(-0.3, 1.6);
  const auto cfg = planar({q1, q2, q0});
  for (int r : {1, 2}) {
    const auto v = thomas_stable(cfg, seidel_spiral(q0, q1, q2, r, 200, {0, 1}));
    EXPECT_FALSE(v.stable);
    EXPECT_EQ(v.witness, 2);
  }
}

TEST(StabilityReport, CombinesTheInvariants) {
  const auto cfg = planar({P1, P2, Vec2(2, 0.5)});
  const auto r = stability_report(cfg, circular_arc(P1, P2, 2.0 * std::tan(0.3), 201, {0, 1}), 0.1);
  EXPECT_EQ(r.maslov, 0);
  EXPECT_EQ(r.tau, 0.0);
  EXPECT_TRUE(r.almost_calibrated);
  EXPECT_FALSE(r.thomas.stable);
  ASSERT_TRUE(r.flow.has_value());
  EXPECT_FALSE(r.flow->stable);
  const auto spiral = stability_report(planar({Vec2(1, 0), Vec2(-0.3, 1.6), Vec2(0, 0)}),
                                       seidel_spiral({0, 0}, {1, 0}, {-0.3, 1.6}, 1, 200, {0, 1}));
  EXPECT_FALSE(spiral.flow.has_value());
  EXPECT_FALSE(spiral.almost_calibrated);
}
