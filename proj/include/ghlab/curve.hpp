// Planar polylines: the projections of circle-invariant surfaces.
#pragma once

#include "ghlab/monopole.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace ghlab {

struct ClosedCurve {};

/// An arc pinned at two centers of the configuration.
struct OpenCurve {
  int start_center = 0;
  int end_center = 1;
};

using CurveKind = std::variant<ClosedCurve, OpenCurve>;

struct PolyCurve {
  Plane plane;
  std::vector<Vec2> nodes;
  CurveKind kind = ClosedCurve{};

  bool closed() const { return std::holds_alternative<ClosedCurve>(kind); }
  std::size_t size() const { return nodes.size(); }
  /// Number of edges, counting the closing edge of a closed curve.
  std::size_t edges() const { return closed() ? nodes.size() : nodes.size() - 1; }
  const Vec2& node(std::size_t i) const { return nodes[i % nodes.size()]; }
  Vec3 point3d(std::size_t i) const { return plane.to3d(node(i)); }
  const Vec2& front() const { return nodes.front(); }
  const Vec2& back() const { return nodes.back(); }
};

inline double curve_length(const PolyCurve& c) {
  double L = 0.0;
  for (std::size_t i = 0; i < c.edges(); ++i) L += (c.node(i + 1) - c.node(i)).norm();
  return L;
}

/// Area of the invariant surface over the curve.
inline double surface_area(const PolyCurve& c) { return two_pi * curve_length(c); }

inline double curve_diameter(const PolyCurve& c) {
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) d = std::max(d, (c.nodes[i] - c.nodes[j]).norm());
  return d;
}

// ---------------------------------------------------------------------------------------------
// Segment predicates

namespace geom {

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

inline bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

/// Closed-segment intersection test, including touching and collinear overlap.
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double L2 = ab.squaredNorm();
  if (L2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / L2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace geom

/// First pair of non-adjacent edges that touch, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(
    const PolyCurve& c) {
  const std::size_t m = c.edges();
  // Bounding boxes let most pairs be rejected without the orientation tests.
  std::vector<Eigen::Vector4d> box(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 &a = c.node(i), &b = c.node(i + 1);
    box[i] << std::min(a.x(), b.x()), std::min(a.y(), b.y()), std::max(a.x(), b.x()),
        std::max(a.y(), b.y());
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool adjacent = j == i + 1 || (c.closed() && i == 0 && j == m - 1);
      if (box[i][2] < box[j][0] || box[j][2] < box[i][0] || box[i][3] < box[j][1] ||
          box[j][3] < box[i][1])
        continue;
      if (adjacent) {
        // Adjacent edges share one node; they must not fold back onto each other.
        const std::size_t shared = (j == i + 1) ? j : 0;
        const Vec2& s = c.node(shared);
        const Vec2& p = c.node(shared == j ? i : 1);
        const Vec2& q = c.node(shared == j ? j + 1 : m - 1);
        if (geom::orient(p, s, q) == 0.0 && (p - s).dot(q - s) > 0.0) return std::pair{i, j};
        continue;
      }
      if (geom::segments_intersect(c.node(i), c.node(i + 1), c.node(j), c.node(j + 1)))
        return std::pair{i, j};
    }
  return std::nullopt;
}

inline bool is_embedded(const PolyCurve& c) { return !find_self_intersection(c).has_value(); }

/// Checks the structural invariants; throws InvalidInput or SelfIntersection.
inline void validate_curve(const PolyCurve& c, const MonopoleConfig& config) {
  const std::size_t min_nodes = c.closed() ? 3 : 2;
  require(c.size() >= min_nodes, ErrorKind::InvalidInput, "curve has too few nodes");
  for (const auto& p : c.nodes)
    require(p.allFinite(), ErrorKind::InvalidInput, "curve nodes must be finite");
  for (std::size_t i = 0; i < c.edges(); ++i)
    require(c.node(i) != c.node(i + 1), ErrorKind::InvalidInput,
            "consecutive curve nodes must be distinct");
  if (const auto* o = std::get_if<OpenCurve>(&c.kind)) {
    const int k = static_cast<int>(config.size());
    require(o->start_center >= 0 && o->start_center < k && o->end_center >= 0 &&
                o->end_center < k && o->start_center != o->end_center,
            ErrorKind::InvalidInput, "open curve must join two distinct centers");
    const double tol = 1e-9 * config.hull_diameter();
    for (int idx : {o->start_center, o->end_center})
      require(c.plane.distance(config.position(idx)) < tol, ErrorKind::InvalidInput,
              "open-curve endpoint centers must lie in the curve plane");
    require(c.front() == c.plane.project(config.position(o->start_center)) &&
                c.back() == c.plane.project(config.position(o->end_center)),
            ErrorKind::InvalidInput, "open-curve endpoints must coincide with their centers");
  }
  require(is_embedded(c), ErrorKind::SelfIntersection, "curve is not embedded");
}

/// Snaps the end nodes of an open curve onto the exact projections of its centers.
inline void pin_endpoints(PolyCurve& c, const MonopoleConfig& config) {
  if (const auto* o = std::get_if<OpenCurve>(&c.kind)) {
    c.nodes.front() = c.plane.project(config.position(o->start_center));
    c.nodes.back() = c.plane.project(config.position(o->end_center));
  }
}

/// Resamples to n nodes equally spaced in arclength (linear interpolation). Open curves keep
/// their end nodes bit-for-bit; closed curves keep node 0.
inline PolyCurve resample_uniform(const PolyCurve& c, std::size_t n) {
  require(n >= (c.closed() ? 3u : 2u), ErrorKind::InvalidInput, "too few nodes requested");
  const std::size_t m = c.edges();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + (c.node(i + 1) - c.node(i)).norm();
  const double L = cum.back();
  PolyCurve out{c.plane, {}, c.kind};
  out.nodes.reserve(n);
  const std::size_t steps = c.closed() ? n : n - 1;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!c.closed() && k == n - 1) {
      out.nodes.push_back(c.back());
      break;
    }
    if (k == 0) {
      out.nodes.push_back(c.front());
      continue;
    }
    const double s = L * static_cast<double>(k) / static_cast<double>(steps);
    while (seg + 1 < m && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
    out.nodes.push_back((1.0 - t) * c.node(seg) + t * c.node(seg + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Curvature

/// Signed curvature of the circle through a, b, c; positive when the path turns left.
inline double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
  require(ab > 0.0 && bc > 0.0 && ca > 0.0, ErrorKind::DegenerateStencil,
          "curvature stencil has coincident points");
  return 2.0 * cross2(b - a, c - b) / (ab * bc * ca);
}

/// Curvature at every node that has two neighbours: all nodes of a closed curve, interior nodes
/// (1 .. n-2) of an open one. Positive means the unit normal rotated a quarter turn to the left
/// of the tangent, so a counter-clockwise circle of radius R has curvature 1/R.
inline std::vector<double> curvature_profile(const PolyCurve& c) {
  require(c.size() >= 3, ErrorKind::DegenerateStencil, "curvature needs at least three nodes");
  std::vector<double> k;
  if (c.closed()) {
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i)
      k.push_back(menger_curvature(c.node(i + n - 1), c.node(i), c.node(i + 1)));
  } else {
    for (std::size_t i = 1; i + 1 < c.size(); ++i)
      k.push_back(menger_curvature(c.nodes[i - 1], c.nodes[i], c.nodes[i + 1]));
  }
  return k;
}

// ---------------------------------------------------------------------------------------------
// Grading: a continuous lift of the tangent angle.

struct GradingProfile {
  std::vector<double> beta;  // one value per node
  double inf_beta = 0.0;
  double sup_beta = 0.0;
  double variation = 0.0;
  /// Closed curves: lift change over one full traversal (2 pi times the Maslov number).
  double total_turning = 0.0;
  /// Closed curves: how far the lifted end value misses the start value modulo 2 pi.
  double endpoint_mismatch = 0.0;
};

namespace detail {

// Tangent angle at a node from the circle through the node and its two neighbours: the chord
// angle corrected by half the arc the chord subtends. Exact for nodes lying on a circle.
inline double half_arc(double kappa, double chord) {
  return std::asin(std::clamp(0.5 * kappa * chord, -1.0, 1.0));
}

}  // namespace detail

inline GradingProfile grading(const PolyCurve& c) {
  const std::size_t n = c.size();
  require(n >= 2, ErrorKind::InvalidInput, "grading needs at least two nodes");
  std::vector<double> raw(n);
  auto edge_angle = [&](std::size_t i) { return angle_of(c.node(i + 1) - c.node(i)); };
  if (c.closed()) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 &a = c.node(i + n - 1), &b = c.node(i), &d = c.node(i + 1);
      raw[i] = angle_of(b - a) + detail::half_arc(menger_curvature(a, b, d), (b - a).norm());
    }
  } else if (n == 2) {
    raw[0] = raw[1] = edge_angle(0);
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec2 &a = c.nodes[i - 1], &b = c.nodes[i], &d = c.nodes[i + 1];
      raw[i] = angle_of(b - a) + detail::half_arc(menger_curvature(a, b, d), (b - a).norm());
    }
    const double k0 = menger_curvature(c.nodes[0], c.nodes[1], c.nodes[2]);
    raw[0] = edge_angle(0) - detail::half_arc(k0, (c.nodes[1] - c.nodes[0]).norm());
    const double k1 = menger_curvature(c.nodes[n - 3], c.nodes[n - 2], c.nodes[n - 1]);
    raw[n - 1] = edge_angle(n - 2) + detail::half_arc(k1, (c.nodes[n - 1] - c.nodes[n - 2]).norm());
  }

  GradingProfile g;
  g.beta.resize(n);
  g.beta[0] = wrap_angle(raw[0]);
  for (std::size_t i = 1; i < n; ++i) g.beta[i] = g.beta[i - 1] + wrap_angle(raw[i] - raw[i - 1]);
  g.inf_beta = *std::min_element(g.beta.begin(), g.beta.end());
  g.sup_beta = *std::max_element(g.beta.begin(), g.beta.end());
  g.variation = g.sup_beta - g.inf_beta;
  if (c.closed()) {
    const double back_to_start = g.beta[n - 1] + wrap_angle(raw[0] - raw[n - 1]);
    g.total_turning = back_to_start - g.beta[0];
    g.endpoint_mismatch = std::abs(std::remainder(g.total_turning, two_pi));
  }
  return g;
}

inline int maslov_number(const PolyCurve& c) {
  if (!c.closed()) return 0;
  return static_cast<int>(std::lround(grading(c).total_turning / two_pi));
}

/// Angle of the endpoint difference against the first plane axis, in (-pi, pi].
inline double cohomological_phase(const PolyCurve& c) {
  require(!c.closed(), ErrorKind::InvalidInput, "phase is defined for open curves");
  const Vec2 d = c.back() - c.front();
  require(d.norm() > 0.0, ErrorKind::CoincidentEndpoints, "curve endpoints coincide");
  return wrap_angle(angle_of(d));
}

inline bool almost_calibrated(const PolyCurve& c, double delta) {
  require(delta > 0.0, ErrorKind::InvalidInput, "almost-calibrated margin must be positive");
  return grading(c).variation < pi - delta;
}

/// Winding number of a closed polyline (given as a node loop) about p.
inline double winding_number(const std::vector<Vec2>& loop, const Vec2& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 a = loop[i] - p, b = loop[(i + 1) % loop.size()] - p;
    total += std::atan2(cross2(a, b), a.dot(b));
  }
  return total / two_pi;
}

/// The node loop of an open curve followed by its reversed chord (the closing edge is implicit).
inline std::vector<Vec2> loop_with_chord(const PolyCurve& c) {
  require(!c.closed(), ErrorKind::InvalidInput, "loop with chord needs an open curve");
  return c.nodes;
}

}  // namespace ghlab
