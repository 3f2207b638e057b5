// Hand-labelled stability scenarios used by tests, the acceptance suite and the CLI.
#pragma once

#include "ghlab/lagrangian.hpp"

#include <string>

namespace ghlab {

enum class FlowExpectation { Stable, Unstable, NotAlmostCalibrated };

inline const char* to_string(FlowExpectation f) {
  switch (f) {
    case FlowExpectation::Stable: return "stable";
    case FlowExpectation::Unstable: return "unstable";
    case FlowExpectation::NotAlmostCalibrated: return "not-almost-calibrated";
  }
  return "unknown";
}

struct CuratedScenario {
  std::string name;
  MonopoleConfig config;
  PolyCurve curve;
  bool thomas_stable = true;
  FlowExpectation flow = FlowExpectation::Stable;
  std::optional<int> witness;  // expected destabilizing center
};

namespace detail {

inline MonopoleConfig planar_config(const std::vector<Vec2>& pts) {
  std::vector<Vec3> xs;
  for (const auto& p : pts) xs.emplace_back(p.x(), p.y(), 0.0);
  return MonopoleConfig::finite(0.0, xs);
}

}  // namespace detail

/// The twist-commutator arc: twists about loops around {A, p2} and {B, p2}.
inline PolyCurve commutator_arc(std::size_t n = 4000) {
  const Vec2 p1(0, 0), p2(4, 0);
  const AnnulusTwist t1{Vec2(3.3, 0.5), 1.2, 0.25, 1}, t2{Vec2(3.3, -0.5), 1.2, 0.25, 1};
  auto inv = [](AnnulusTwist t) {
    t.power = -t.power;
    return t;
  };
  return twisted_chord(p1, p2, {t1, t2, inv(t1), inv(t2)}, n, OpenCurve{0, 1});
}

inline std::vector<CuratedScenario> curated_scenarios() {
  std::vector<CuratedScenario> out;
  const Vec2 p1(0, 0), p2(4, 0);
  const auto three = detail::planar_config({p1, p2, Vec2(2, 0.5)});

  out.push_back({"chord", three, circular_arc(p1, p2, 0.0, 41, {0, 1}), true,
                 FlowExpectation::Stable, std::nullopt});
  // Shallow arc over the third center with tangent angles in (-0.6, 0.6).
  out.push_back({"arc-over-center", three, circular_arc(p1, p2, 2.0 * std::tan(0.3), 201, {0, 1}),
                 false, FlowExpectation::Unstable, 2});
  out.push_back({"arc-away-from-center", three, circular_arc(p1, p2, -0.8, 201, {0, 1}), true,
                 FlowExpectation::Stable, std::nullopt});
  out.push_back({"deep-arc-around-center", detail::planar_config({p1, p2, Vec2(2, -1)}),
                 circular_arc(p1, p2, -1.2, 201, {0, 1}), false, FlowExpectation::Unstable, 2});
  out.push_back({"twist-commutator",
                 detail::planar_config({p1, p2, Vec2(2.5, 0.8), Vec2(2.5, -0.8)}),
                 commutator_arc(), false, FlowExpectation::NotAlmostCalibrated, std::nullopt});
  {
    const Vec2 q0(0, 0), q1(1, 0), q2(-0.3, 1.6);
    out.push_back({"seidel-spiral-1", detail::planar_config({q1, q2, q0}),
                   seidel_spiral(q0, q1, q2, 1, 200, {0, 1}), false,
                   FlowExpectation::NotAlmostCalibrated, 2});
  }
  out.push_back({"two-center-arc", detail::planar_config({p1, p2}),
                 circular_arc(p1, p2, 2.0 * std::tan(0.2 * pi), 201, {0, 1}), true,
                 FlowExpectation::Stable, std::nullopt});
  return out;
}

}  // namespace ghlab
