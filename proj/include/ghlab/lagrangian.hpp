// Lagrangian quantities of planar curves and the stability predicates built on them.
#pragma once

#include "ghlab/curve.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>

namespace ghlab {

// ---------------------------------------------------------------------------------------------
// Which symplectic forms make a curve Lagrangian

/// Largest |<unit tangent, v>| over the segments; zero exactly when the curve is Lagrangian for
/// the symplectic form selected by the unit vector v.
inline double lagrangian_defect(const std::vector<Vec3>& curve, const Vec3& v) {
  require(curve.size() >= 2, ErrorKind::InvalidInput, "defect needs at least two points");
  require(std::abs(v.norm() - 1.0) < 1e-12, ErrorKind::InvalidInput, "v must be a unit vector");
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const Vec3 e = curve[i + 1] - curve[i];
    const double len = e.norm();
    if (len > 0.0) d = std::max(d, std::abs(e.dot(v)) / len);
  }
  return d;
}

/// The admissible directions v for a sphere over the segment p_i p_j: the great circle
/// orthogonal to axis.
struct LagrangianDirections {
  Vec3 axis;

  bool admits(const Vec3& v, double tol = 1e-12) const { return std::abs(axis.dot(v)) < tol; }

  /// n equally spaced unit vectors on the admissible great circle.
  std::vector<Vec3> sample(std::size_t n) const {
    const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 a = axis.cross(helper).normalized();
    const Vec3 b = axis.cross(a);
    std::vector<Vec3> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = two_pi * static_cast<double>(k) / static_cast<double>(n);
      out.push_back(std::cos(t) * a + std::sin(t) * b);
    }
    return out;
  }

  /// Pairing of [omega_v] with the sphere class: 2 pi <p_j - p_i, v>.
  static double period(const Vec3& pi_, const Vec3& pj, const Vec3& v) {
    return two_pi * (pj - pi_).dot(v);
  }
};

inline LagrangianDirections lagrangian_directions(const Vec3& p_i, const Vec3& p_j) {
  const Vec3 d = p_j - p_i;
  require(d.norm() > 0.0, ErrorKind::CoincidentPoints, "the two centers coincide");
  return {d.normalized()};
}

// ---------------------------------------------------------------------------------------------
// Homotopy class of an arc rel endpoints in the punctured plane

struct HomotopyLetter {
  int center = -1;
  int sign = 0;
  bool operator==(const HomotopyLetter&) const = default;
};

/// Freely reduced word in the free group on the non-endpoint centers of the plane.
struct HomotopyWord {
  std::vector<HomotopyLetter> letters;
  double ray_angle = 0.0;  // common direction of the cut rays that produced the word
  bool trivial() const { return letters.empty(); }
  /// Exponent sum of one generator, i.e. the winding number about that center.
  int exponent_sum(int center) const {
    int s = 0;
    for (const auto& l : letters)
      if (l.center == center) s += l.sign;
    return s;
  }
};

namespace detail {

inline void push_reduced(std::vector<HomotopyLetter>& w, HomotopyLetter l) {
  if (!w.empty() && w.back().center == l.center && w.back().sign == -l.sign)
    w.pop_back();
  else
    w.push_back(l);
}

// Crossings of the closed loop with parallel cut rays from each puncture, in loop order.
// Returns nullopt when the chosen direction is degenerate for this loop.
inline std::optional<std::vector<HomotopyLetter>> crossing_word(
    const std::vector<Vec2>& loop, const std::vector<std::pair<int, Vec2>>& punctures,
    const std::vector<Vec2>& avoid, const Vec2& d, double scale) {
  const double eps = 1e-10 * scale;
  for (const auto& [idx, q] : punctures) {
    // The ray must keep clear of the other punctures and of the endpoints.
    for (const auto& p : avoid) {
      if ((p - q).norm() == 0.0) continue;
      const double along = (p - q).dot(d);
      if (along > -eps && std::abs(cross2(d, p - q)) < 1e3 * eps) return std::nullopt;
    }
    // No loop vertex may sit on the ray.
    for (const auto& p : loop) {
      const double along = (p - q).dot(d);
      if (along > -eps && std::abs(cross2(d, p - q)) < eps) return std::nullopt;
    }
  }
  std::vector<HomotopyLetter> word;
  const std::size_t n = loop.size();
  std::vector<std::pair<double, HomotopyLetter>> hits;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % n];
    const Vec2 e = b - a;
    hits.clear();
    for (const auto& [idx, q] : punctures) {
      // Solve a + s e = q + t d with s in [0, 1), t >= 0.
      const double den = cross2(e, d);
      if (den == 0.0) continue;
      const double s = cross2(q - a, d) / den;
      const double t = cross2(q - a, e) / den;
      if (s < 0.0 || s >= 1.0 || t < 0.0) continue;
      const int sign = cross2(d, e) > 0.0 ? 1 : -1;
      hits.push_back({s, {idx, sign}});
    }
    std::sort(hits.begin(), hits.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& h : hits) push_reduced(word, h.second);
  }
  // The word of a loop is defined up to cyclic shift only through the base point; the base
  // point here is the start of the arc, so no cyclic reduction is applied.
  return word;
}

}  // namespace detail

/// In-plane centers other than the endpoints of an open curve, with their projections.
inline std::vector<std::pair<int, Vec2>> plane_punctures(const MonopoleConfig& config,
                                                         const PolyCurve& c) {
  std::vector<std::pair<int, Vec2>> out;
  const double tol = 1e-9 * config.hull_diameter();
  const auto* o = std::get_if<OpenCurve>(&c.kind);
  for (std::size_t i = 0; i < config.size(); ++i) {
    const int idx = static_cast<int>(i);
    if (o && (idx == o->start_center || idx == o->end_center)) continue;
    if (c.plane.distance(config.position(i)) < tol)
      out.emplace_back(idx, c.plane.project(config.position(i)));
  }
  return out;
}

/// Reduced crossing word of the loop formed by the arc and its reversed chord. All cut rays
/// share one random direction drawn from the seed; degenerate directions are redrawn.
inline HomotopyWord homotopy_word(const MonopoleConfig& config, const PolyCurve& c,
                                  std::uint64_t seed = 0) {
  require(!c.closed(), ErrorKind::InvalidInput, "homotopy word needs an open curve");
  validate_curve(c, config);
  const auto punct = plane_punctures(config, c);
  const double scale = std::max(config.hull_diameter(), curve_diameter(c));
  for (std::size_t i = 1; i + 1 < c.size(); ++i)
    for (const auto& [idx, q] : punct)
      require((c.nodes[i] - q).norm() > config.exclusion_radius, ErrorKind::CenterCollision,
              "curve passes through a center");
  std::vector<Vec2> avoid{c.front(), c.back()};
  for (const auto& [idx, q] : punct) avoid.push_back(q);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-pi, pi);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double a = angle(rng);
    const Vec2 d(std::cos(a), std::sin(a));
    if (auto w = detail::crossing_word(c.nodes, punct, avoid, d, scale))
      return {std::move(*w), a};
  }
  throw Error(ErrorKind::RayDegeneracy, "no non-degenerate cut-ray direction found");
}

struct ThomasVerdict {
  bool stable = true;
  std::optional<int> witness;  // destabilizing center
  HomotopyWord word;
};

/// Stable exactly when the arc is isotopic to its chord in the plane punctured at the other
/// centers, i.e. when its homotopy word is trivial.
inline ThomasVerdict thomas_stable(const MonopoleConfig& config, const PolyCurve& c,
                                   std::uint64_t seed = 0) {
  ThomasVerdict v;
  v.word = homotopy_word(config, c, seed);
  v.stable = v.word.trivial();
  if (!v.stable) v.witness = v.word.letters.front().center;
  return v;
}

// ---------------------------------------------------------------------------------------------
// Flow stability

struct Decomposition {
  int split_index = -1;
  Vec3 split_center = Vec3::Zero();
  /// Angles of p1 -> q and q -> p2, relative to the chord.
  std::array<double, 2> chord_angles{};
  std::array<double, 2> chord_lengths{};
  double winding = 0.0;
  bool condition_a = false;
  bool condition_b = false;
  bool passes() const { return condition_a || condition_b; }
};

/// Conditions (a) and (b) for splitting the arc p1 -> p2 at q, given the grading range
/// (inf, sup) in the frame where the chord has phase zero and the arc length.
inline Decomposition decomposition_conditions(const Vec2& p1, const Vec2& p2, const Vec2& q,
                                              double inf_beta, double sup_beta, double length) {
  const double tau = angle_of(p2 - p1);
  Decomposition d;
  d.chord_angles = {wrap_angle(angle_of(q - p1) - tau), wrap_angle(angle_of(p2 - q) - tau)};
  d.chord_lengths = {(q - p1).norm(), (p2 - q).norm()};
  const double a_min = std::min(d.chord_angles[0], d.chord_angles[1]);
  const double a_max = std::max(d.chord_angles[0], d.chord_angles[1]);
  d.condition_a = a_min <= inf_beta || a_max >= sup_beta;
  d.condition_b = length < d.chord_lengths[0] + d.chord_lengths[1];
  return d;
}

struct FlowStableVerdict {
  bool stable = true;
  std::optional<Decomposition> witness;  // first failing decomposition
  std::vector<Decomposition> candidates;
  /// Grading range in the frame where the chord points along the first axis.
  double inf_beta = 0.0;
  double sup_beta = 0.0;
  double length = 0.0;
};

/// Tests every split at an enclosed center q (nonzero winding of arc + reversed chord) for
///   (a) the closed interval between the two chord angles is not inside (inf beta, sup beta), or
///   (b) Length(arc) < |p1 - q| + |q - p2| (strict).
/// Angles are measured in the frame where the chord has phase zero; the grading lift is shifted
/// by a multiple of 2 pi to bring zero into (or nearest to) its range.
inline FlowStableVerdict flow_stable(const MonopoleConfig& config, const PolyCurve& c) {
  require(!c.closed(), ErrorKind::InvalidInput, "flow stability needs an open curve");
  validate_curve(c, config);
  const auto g = grading(c);
  require(g.variation < pi, ErrorKind::NotAlmostCalibrated,
          "angle variation is not below pi");
  const double tau = cohomological_phase(c);
  double lo = g.inf_beta - tau, hi = g.sup_beta - tau;
  // Largest shift with lo <= 0; if the range then still sits below zero, the next branch up
  // may be closer.
  const double shift = two_pi * std::floor(-lo / two_pi);
  lo += shift;
  hi += shift;
  if (hi < 0.0 && lo + two_pi < -hi) {
    lo += two_pi;
    hi += two_pi;
  }

  FlowStableVerdict v;
  v.inf_beta = lo;
  v.sup_beta = hi;
  v.length = curve_length(c);
  const auto loop = loop_with_chord(c);
  const Vec2 p1 = c.front(), p2 = c.back();
  for (const auto& [idx, q] : plane_punctures(config, c)) {
    const double w = winding_number(loop, q);
    if (std::abs(w) < 0.5) continue;
    Decomposition d = decomposition_conditions(p1, p2, q, lo, hi, v.length);
    d.split_index = idx;
    d.split_center = config.position(static_cast<std::size_t>(idx));
    d.winding = w;
    v.candidates.push_back(d);
    if (!d.passes() && v.stable) {
      v.stable = false;
      v.witness = d;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------------------------
// Jordan-Holder chains

struct ChainSegment {
  Vec2 from = Vec2::Zero();
  Vec2 to = Vec2::Zero();
  int from_center = -1;
  int to_center = -1;
  double tau = 0.0;  // facet angle relative to the chord
};

struct JordanHolderChain {
  std::vector<ChainSegment> chain;
  /// True when the arc runs counter-clockwise around its region; the chain is then built for
  /// the reversed orientation (from p2 to p1) so that the phases still decrease.
  bool reversed = false;
  bool monotone = true;
};

namespace detail {

// Convex hull in counter-clockwise order, collinear points dropped (Andrew's monotone chain).
inline std::vector<std::size_t> convex_hull(const std::vector<Vec2>& pts) {
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  if (idx.size() < 3) return idx;
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    while (k >= 2 && geom::orient(pts[h[k - 2]], pts[h[k - 1]], pts[idx[i]]) <= 0.0) --k;
    h[k++] = idx[i];
  }
  for (std::size_t i = idx.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && geom::orient(pts[h[k - 2]], pts[h[k - 1]], pts[idx[i]]) <= 0.0) --k;
    h[k++] = idx[i];
  }
  h.resize(k - 1);
  return h;
}

inline double signed_area(const std::vector<Vec2>& loop) {
  double a = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) a += cross2(loop[i], loop[(i + 1) % loop.size()]);
  return 0.5 * a;
}

}  // namespace detail

/// Convex-hull chain of the endpoints and enclosed centers, from the start endpoint to the end
/// endpoint on the side of the arc, with phases relative to the chord. Requires the discrete
/// curvature to keep one sign (|kappa| > 1e-9) at every interior node.
inline JordanHolderChain jordan_holder(const MonopoleConfig& config, const PolyCurve& c) {
  require(!c.closed(), ErrorKind::InvalidInput, "Jordan-Holder chain needs an open curve");
  validate_curve(c, config);
  const auto kappa = curvature_profile(c);
  const bool positive = kappa.front() > 0.0;
  for (double k : kappa)
    require(std::abs(k) > 1e-9 && (k > 0.0) == positive, ErrorKind::NotPerfectMorse,
            "interior curvature vanishes or changes sign");

  const auto loop = loop_with_chord(c);
  JordanHolderChain out;
  out.reversed = detail::signed_area(loop) > 0.0;
  const auto& open = std::get<OpenCurve>(c.kind);
  Vec2 start = c.front(), end = c.back();
  int start_idx = open.start_center, end_idx = open.end_center;
  if (out.reversed) {
    std::swap(start, end);
    std::swap(start_idx, end_idx);
  }

  std::vector<Vec2> pts{start, end};
  std::vector<int> ids{start_idx, end_idx};
  for (const auto& [idx, q] : plane_punctures(config, c))
    if (std::abs(winding_number(loop, q)) >= 0.5) {
      pts.push_back(q);
      ids.push_back(idx);
    }

  const double chord_angle = angle_of(end - start);
  auto add = [&](std::size_t a, std::size_t b, double tau) {
    out.chain.push_back({pts[a], pts[b], ids[a], ids[b], tau});
  };
  const auto hull = detail::convex_hull(pts);
  if (pts.size() == 2 || hull.size() < 3) {
    add(0, 1, 0.0);
    return out;
  }
  // In counter-clockwise hull order the side to the left of start -> end runs from end back
  // to start, so walk it from end and reverse.
  const auto pos = [&](std::size_t which) {
    return static_cast<std::size_t>(std::find(hull.begin(), hull.end(), which) - hull.begin());
  };
  std::vector<std::size_t> path;
  for (std::size_t i = pos(1);; i = (i + 1) % hull.size()) {
    path.push_back(hull[i]);
    if (hull[i] == 0) break;
  }
  std::reverse(path.begin(), path.end());

  double tau = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double raw = wrap_angle(angle_of(pts[path[i + 1]] - pts[path[i]]) - chord_angle);
    tau = i == 0 ? raw : tau + wrap_angle(raw - tau);
    add(path[i], path[i + 1], tau);
  }
  for (std::size_t i = 1; i < out.chain.size(); ++i)
    if (out.chain[i].tau > out.chain[i - 1].tau + 1e-12) out.monotone = false;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Knotting invariant

/// Winding number about p0 of curve_r followed by curve_s reversed; both arcs must share their
/// endpoints.
inline int seidel_invariant(const PolyCurve& curve_r, const PolyCurve& curve_s, const Vec3& p0) {
  require(!curve_r.closed() && !curve_s.closed(), ErrorKind::InvalidInput,
          "Seidel invariant needs open curves");
  require(curve_r.front() == curve_s.front() && curve_r.back() == curve_s.back(),
          ErrorKind::InvalidInput, "curves must share their endpoints");
  std::vector<Vec2> loop = curve_r.nodes;
  for (std::size_t i = curve_s.size() - 1; i-- > 1;) loop.push_back(curve_s.nodes[i]);
  const Vec2 q = curve_r.plane.project(p0);
  for (const auto& p : loop)
    require((p - q).norm() > 0.0, ErrorKind::InvalidInput, "loop passes through p0");
  return static_cast<int>(std::lround(winding_number(loop, q)));
}

// ---------------------------------------------------------------------------------------------
// Curve builders

/// Circular arc from p1 to p2 with signed sagitta (positive bulges to the left of p1 -> p2),
/// n nodes equally spaced in angle; end nodes are exactly p1 and p2.
inline PolyCurve circular_arc(const Vec2& p1, const Vec2& p2, double sagitta, std::size_t n,
                              OpenCurve kind = {}, Plane plane = {}) {
  require(n >= 2, ErrorKind::InvalidInput, "arc needs at least two nodes");
  const Vec2 e = p2 - p1;
  const double half = 0.5 * e.norm();
  require(half > 0.0, ErrorKind::CoincidentEndpoints, "arc endpoints coincide");
  PolyCurve c{plane, {}, kind};
  if (sagitta == 0.0) {
    for (std::size_t i = 0; i < n; ++i) c.nodes.push_back(p1 + e * (double(i) / double(n - 1)));
  } else {
    const Vec2 ex = e.normalized(), ey(-ex.y(), ex.x());
    const double R = (half * half + sagitta * sagitta) / (2.0 * std::abs(sagitta));
    const double cy = sagitta > 0.0 ? sagitta - R : sagitta + R;  // center height over midpoint
    const Vec2 center = p1 + half * ex + cy * ey;
    const double a0 = std::atan2(-cy, -half), a1 = std::atan2(-cy, half);
    double span = a1 - a0;  // sweep clockwise for arcs on the left, counter-clockwise otherwise
    if (sagitta > 0.0 && span > 0.0) span -= two_pi;
    if (sagitta < 0.0 && span < 0.0) span += two_pi;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = a0 + span * static_cast<double>(i) / static_cast<double>(n - 1);
      c.nodes.push_back(center + R * (std::cos(t) * ex + std::sin(t) * ey));
    }
  }
  c.nodes.front() = p1;
  c.nodes.back() = p2;
  return c;
}

/// Arc from p1 to p2 spiralling counter-clockwise around p0 with the radius growing linearly in
/// the swept angle. It crosses the segment p0 p2 and the ray beyond p1 (away from p0) exactly r
/// times each and never meets the segment p0 p1. Needs |p2 - p0| > |p1 - p0|.
inline PolyCurve seidel_spiral(const Vec2& p0, const Vec2& p1, const Vec2& p2, int r,
                               std::size_t nodes_per_turn = 200, OpenCurve kind = {},
                               Plane plane = {}) {
  require(r >= 0, ErrorKind::InvalidInput, "spiral index must be non-negative");
  const double d1 = (p1 - p0).norm(), d2 = (p2 - p0).norm();
  require(d1 > 0.0 && d2 > d1, ErrorKind::InvalidInput,
          "spiral needs p2 farther from p0 than p1");
  const double base = angle_of(p1 - p0);
  double theta2 = angle_of(p2 - p0) - base;
  while (theta2 <= 0.0) theta2 += two_pi;
  while (theta2 > two_pi) theta2 -= two_pi;
  const double theta_end = theta2 + two_pi * r;
  const auto n = static_cast<std::size_t>(
      std::max(16.0, std::ceil(nodes_per_turn * theta_end / two_pi)));
  PolyCurve c{plane, {}, kind};
  for (std::size_t i = 0; i <= n; ++i) {
    const double th = theta_end * static_cast<double>(i) / static_cast<double>(n);
    const double rho = d1 + (d2 - d1) * th / theta_end;
    c.nodes.push_back(p0 + rho * Vec2(std::cos(base + th), std::sin(base + th)));
  }
  c.nodes.front() = p1;
  c.nodes.back() = p2;
  return c;
}

/// Dehn twist supported on the annulus |x - center| in [R - w, R + w]: points are rotated
/// about the center by 2 pi times a smooth ramp of the radius (inverse for negative power).
struct AnnulusTwist {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  double half_width = 0.1;
  int power = 1;

  Vec2 operator()(const Vec2& x) const {
    const Vec2 v = x - center;
    const double r = v.norm();
    const double s = (r - (radius - half_width)) / (2.0 * half_width);
    if (s <= 0.0 || s >= 1.0) return x;
    const double ramp = s * s * (3.0 - 2.0 * s);
    const double a = two_pi * power * ramp;
    const double ca = std::cos(a), sa = std::sin(a);
    return center + Vec2(ca * v.x() - sa * v.y(), sa * v.x() + ca * v.y());
  }
};

/// Image of the chord p1 p2 under the composition of twists (applied right to left), resampled
/// to n nodes of equal arclength. Composed twists stretch some parts of the chord by orders of
/// magnitude, so the chord parameter is subdivided adaptively until every image edge is
/// shorter than max_edge.
inline PolyCurve twisted_chord(const Vec2& p1, const Vec2& p2,
                               const std::vector<AnnulusTwist>& twists, std::size_t n,
                               OpenCurve kind = {}, Plane plane = {}, double max_edge = 1e-3) {
  auto image = [&](double t) {
    Vec2 x = p1 + (p2 - p1) * t;
    for (auto it = twists.rbegin(); it != twists.rend(); ++it) x = (*it)(x);
    return x;
  };
  PolyCurve c{plane, {p1}, kind};
  // Depth-first subdivision with an explicit stack of parameter intervals.
  std::vector<std::pair<double, double>> todo{{0.0, 1.0}};
  Vec2 last = p1;
  while (!todo.empty()) {
    const auto [a, b] = todo.back();
    todo.pop_back();
    const Vec2 xb = image(b);
    if ((xb - last).norm() > max_edge && b - a > 1e-15) {
      const double mid = 0.5 * (a + b);
      todo.push_back({mid, b});
      todo.push_back({a, mid});
      continue;
    }
    c.nodes.push_back(xb);
    last = xb;
  }
  c.nodes.back() = p2;
  return resample_uniform(c, n);
}

// ---------------------------------------------------------------------------------------------
// Combined report

struct StabilityReport {
  int maslov = 0;
  double tau = 0.0;
  double delta = 0.0;
  double variation = 0.0;
  bool almost_calibrated = false;
  ThomasVerdict thomas;
  /// Absent when the arc is not almost calibrated, in which case flow stability is undefined.
  std::optional<FlowStableVerdict> flow;
};

inline StabilityReport stability_report(const MonopoleConfig& config, const PolyCurve& c,
                                        double delta = 1e-3, std::uint64_t seed = 0) {
  require(!c.closed(), ErrorKind::InvalidInput, "stability report needs an open curve");
  StabilityReport r;
  r.delta = delta;
  r.maslov = maslov_number(c);
  r.tau = cohomological_phase(c);
  r.variation = grading(c).variation;
  r.almost_calibrated = almost_calibrated(c, delta);
  r.thomas = thomas_stable(config, c, seed);
  if (r.variation < pi) r.flow = flow_stable(config, c);
  return r;
}

}  // namespace ghlab
