// Weighted curve shortening flow d(gamma)/dt = phi^{-1} gamma'' (Euclidean arclength), the planar
// reduction of mean curvature flow for circle-invariant surfaces.
#pragma once

#include "ghlab/curve.hpp"

#include <cstdio>
#include <limits>
#include <string>

namespace ghlab {

struct CurveFlowControls {
  /// Node count after every resampling; 0 keeps the initial count.
  std::size_t n_nodes = 0;
  double cfl = 0.4;
  double checkpoint_dt = 0.01;
  double t_max = 10.0;
  /// Blow-up trigger for phi^{-1} kappa^2 (times the hull diameter) and for
  /// phi^{-2} |grad_perp phi|^2 (times the squared hull diameter).
  double singularity_threshold = 1e6;
  /// Open curves converge once Hausdorff distance to the chord and max |kappa| both fall below
  /// this, measured relative to the chord length.
  double conv_tol = 2e-4;
  /// Closed curves are declared extinct once their diameter falls below this fraction of the
  /// initial diameter.
  double extinction_tol = 1e-2;
  /// Distance to a non-endpoint center that counts as a collision; non-positive selects
  /// 1e-4 x hull diameter.
  double collision_radius = -1.0;
  long max_steps = 50'000'000;
};

enum class FlowTerminal {
  Running,
  ConvergedToSegment,
  ShrunkToPoint,
  SingularityDetected,
  MaxTime,
  CenterCollision,
  SelfIntersection,
};

inline const char* to_string(FlowTerminal t) {
  switch (t) {
    case FlowTerminal::Running: return "Running";
    case FlowTerminal::ConvergedToSegment: return "ConvergedToSegment";
    case FlowTerminal::ShrunkToPoint: return "ShrunkToPoint";
    case FlowTerminal::SingularityDetected: return "SingularityDetected";
    case FlowTerminal::MaxTime: return "MaxTime";
    case FlowTerminal::CenterCollision: return "CenterCollision";
    case FlowTerminal::SelfIntersection: return "SelfIntersection";
  }
  return "Unknown";
}

struct BlowupDiagnostics {
  double max_phi_inv_kappa_sq = 0.0;
  double max_phi_inv2_grad_perp_sq = 0.0;
};

/// Maxima over interior nodes of phi^{-1} kappa^2 and phi^{-2} |grad_perp phi|^2, where the
/// perpendicular part is taken against the node tangent in R^3.
inline BlowupDiagnostics blowup_diagnostics(const MonopoleConfig& config, const PolyCurve& c) {
  BlowupDiagnostics d;
  if (c.size() < 3) return d;
  const auto kappa = curvature_profile(c);
  const std::size_t first = c.closed() ? 0 : 1;
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    const std::size_t i = first + j;
    const std::size_t n = c.size();
    const Vec2 t2 = (c.node(i + 1) - c.node(i + n - 1)).normalized();
    const Vec3 t3 = t2.x() * c.plane.u + t2.y() * c.plane.w;
    const auto jet = potential_jet(config, c.point3d(i), 1);
    const Vec3 perp = jet.grad - jet.grad.dot(t3) * t3;
    d.max_phi_inv_kappa_sq = std::max(d.max_phi_inv_kappa_sq, kappa[j] * kappa[j] / jet.value);
    d.max_phi_inv2_grad_perp_sq =
        std::max(d.max_phi_inv2_grad_perp_sq, perp.squaredNorm() / (jet.value * jet.value));
  }
  return d;
}

/// One-sided Hausdorff distance from the nodes to the chord; the chord's own distance to the
/// curve is no larger because the curve joins its endpoints.
inline double hausdorff_to_chord(const PolyCurve& c) {
  double h = 0.0;
  for (const auto& p : c.nodes) h = std::max(h, geom::point_segment_distance(p, c.front(), c.back()));
  return h;
}

struct FlowCheckpoint {
  double t = 0.0;
  double length = 0.0;
  double surface_area = 0.0;
  double beta_variation = 0.0;
  double max_phi_inv_kappa_sq = 0.0;
  double max_phi_inv2_grad_perp_sq = 0.0;
  double min_center_distance = std::numeric_limits<double>::infinity();
  double diameter = 0.0;
  double hausdorff = 0.0;
  double max_abs_kappa = 0.0;
  long steps = 0;
};

struct FlowTrace {
  std::vector<FlowCheckpoint> checkpoints;
  std::vector<PolyCurve> curves;  // one per checkpoint
  FlowTerminal terminal = FlowTerminal::Running;
  std::string message;
  long steps = 0;
};

/// In-plane centers other than the endpoints of an open curve; these are the punctures.
inline std::vector<int> obstacle_centers(const MonopoleConfig& config, const PolyCurve& c) {
  std::vector<int> out;
  const double tol = 1e-9 * config.hull_diameter();
  const auto* o = std::get_if<OpenCurve>(&c.kind);
  for (std::size_t i = 0; i < config.size(); ++i) {
    const int idx = static_cast<int>(i);
    if (o && (idx == o->start_center || idx == o->end_center)) continue;
    if (c.plane.distance(config.position(i)) < tol) out.push_back(idx);
  }
  return out;
}

/// Decides the terminal state of a flow from its latest checkpoint, or Running.
inline FlowTerminal detect_convergence(const PolyCurve& c, const FlowCheckpoint& cp,
                                       const CurveFlowControls& ctl, double initial_diameter,
                                       double hull_diameter) {
  const double s1 = cp.max_phi_inv_kappa_sq * hull_diameter;
  const double s2 = cp.max_phi_inv2_grad_perp_sq * hull_diameter * hull_diameter;
  if (s1 > ctl.singularity_threshold || s2 > ctl.singularity_threshold)
    return FlowTerminal::SingularityDetected;
  if (c.closed()) {
    if (cp.diameter < ctl.extinction_tol * initial_diameter) return FlowTerminal::ShrunkToPoint;
  } else {
    const double L = (c.back() - c.front()).norm();
    if (cp.hausdorff < ctl.conv_tol * L && cp.max_abs_kappa * L < ctl.conv_tol)
      return FlowTerminal::ConvergedToSegment;
  }
  return FlowTerminal::Running;
}

namespace detail {

struct FlowState {
  const MonopoleConfig& config;
  const PolyCurve& shape;  // plane and kind
  std::vector<Vec2> vel;
  double phi_min = 0.0;
  double h_min = 0.0;
  double max_lap_sq_over_phi = 0.0;  // discrete stand-in for phi^{-1} kappa^2

  // Velocity phi^{-1} gamma'' at every moving node; the second difference uses the actual
  // (possibly unequal) neighbour spacings.
  void velocity(const std::vector<Vec2>& x) {
    const std::size_t n = x.size();
    const bool closed = shape.closed();
    vel.assign(n, Vec2::Zero());
    phi_min = std::numeric_limits<double>::infinity();
    h_min = std::numeric_limits<double>::infinity();
    max_lap_sq_over_phi = 0.0;
    const std::size_t lo = closed ? 0 : 1, hi = closed ? n : n - 1;
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec2& a = x[(i + n - 1) % n];
      const Vec2& b = x[i];
      const Vec2& c = x[(i + 1) % n];
      const double h1 = (b - a).norm(), h2 = (c - b).norm();
      h_min = std::min({h_min, h1, h2});
      const Vec2 lap = 2.0 * ((c - b) / h2 - (b - a) / h1) / (h1 + h2);
      const double p = phi(config, shape.plane.to3d(b));
      phi_min = std::min(phi_min, p);
      vel[i] = lap / p;
      max_lap_sq_over_phi = std::max(max_lap_sq_over_phi, lap.squaredNorm() / p);
    }
  }
};

inline double min_distance_to_centers(const PolyCurve& c, const MonopoleConfig& config,
                                      const std::vector<int>& obstacles) {
  double d = std::numeric_limits<double>::infinity();
  for (int idx : obstacles) {
    const Vec2 q = c.plane.project(config.position(idx));
    for (std::size_t i = 0; i < c.edges(); ++i)
      d = std::min(d, geom::point_segment_distance(q, c.node(i), c.node(i + 1)));
  }
  return d;
}

inline double bounding_box_diagonal(const std::vector<Vec2>& x) {
  Vec2 lo = x.front(), hi = x.front();
  for (const auto& p : x) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

}  // namespace detail

inline FlowCheckpoint make_checkpoint(const MonopoleConfig& config, const PolyCurve& c, double t,
                                      long steps, const std::vector<int>& obstacles) {
  FlowCheckpoint cp;
  cp.t = t;
  cp.steps = steps;
  cp.length = curve_length(c);
  cp.surface_area = two_pi * cp.length;
  cp.diameter = curve_diameter(c);
  if (c.size() >= 3) {
    cp.beta_variation = grading(c).variation;
    const auto bd = blowup_diagnostics(config, c);
    cp.max_phi_inv_kappa_sq = bd.max_phi_inv_kappa_sq;
    cp.max_phi_inv2_grad_perp_sq = bd.max_phi_inv2_grad_perp_sq;
    for (double k : curvature_profile(c)) cp.max_abs_kappa = std::max(cp.max_abs_kappa, std::abs(k));
  }
  cp.min_center_distance = detail::min_distance_to_centers(c, config, obstacles);
  if (!c.closed()) cp.hausdorff = hausdorff_to_chord(c);
  return cp;
}

/// Explicit (two-stage, strong-stability-preserving) time stepping of the weighted flow with
/// step dt = cfl h_min^2 phi_min, uniform-arclength resampling at every checkpoint, and the
/// diagnostics needed to classify the outcome. Open-curve endpoints never move and phi is never
/// evaluated there. Collisions and loss of embeddedness end the run and are reported in the
/// trace so that the history leading to them is kept.
inline FlowTrace curve_flow(const MonopoleConfig& config, const PolyCurve& curve0,
                            const CurveFlowControls& ctl = {}) {
  config.validate();
  validate_curve(curve0, config);
  require(ctl.cfl > 0.0 && ctl.cfl <= 0.5, ErrorKind::InvalidInput, "cfl must lie in (0, 0.5]");
  require(ctl.checkpoint_dt > 0.0 && ctl.t_max > 0.0, ErrorKind::InvalidInput,
          "checkpoint interval and final time must be positive");
  const double hull = config.hull_diameter();
  const double collision = ctl.collision_radius > 0.0 ? ctl.collision_radius : 1e-4 * hull;
  const auto obstacles = obstacle_centers(config, curve0);
  const std::size_t n = ctl.n_nodes ? ctl.n_nodes : curve0.size();

  FlowTrace trace;
  PolyCurve cur = resample_uniform(curve0, n);
  pin_endpoints(cur, config);
  const double d0 = curve_diameter(cur);

  std::vector<double> winding0;
  auto windings = [&](const PolyCurve& c) {
    std::vector<double> w;
    for (int idx : obstacles) w.push_back(winding_number(c.nodes, c.plane.project(config.position(idx))));
    return w;
  };
  winding0 = windings(cur);

  auto finish = [&](FlowTerminal t, const std::string& msg) {
    trace.terminal = t;
    trace.message = msg;
  };
  auto checkpoint = [&](double t) {
    trace.checkpoints.push_back(make_checkpoint(config, cur, t, trace.steps, obstacles));
    trace.curves.push_back(cur);
    return trace.checkpoints.back();
  };

  double t = 0.0;
  {
    const auto cp = checkpoint(t);
    const auto term = detect_convergence(cur, cp, ctl, d0, hull);
    if (term != FlowTerminal::Running) {
      finish(term, "initial data already terminal");
      return trace;
    }
  }

  detail::FlowState st{config, cur, {}, 0.0, 0.0};
  std::vector<Vec2> x1;
  double next_cp = ctl.checkpoint_dt;
  char buf[200];
  while (true) {
    try {
      st.velocity(cur.nodes);
      double dt = ctl.cfl * st.h_min * st.h_min * st.phi_min;
      bool at_cp = false;
      if (t + dt >= next_cp) {
        dt = next_cp - t;
        at_cp = true;
      }
      x1 = cur.nodes;
      for (std::size_t i = 0; i < x1.size(); ++i) x1[i] += dt * st.vel[i];
      const std::vector<Vec2> v0 = st.vel;
      st.velocity(x1);
      for (std::size_t i = 0; i < x1.size(); ++i)
        cur.nodes[i] += 0.5 * dt * (v0[i] + st.vel[i]);
      pin_endpoints(cur, config);
      t = at_cp ? next_cp : t + dt;
      ++trace.steps;
    } catch (const Error& e) {
      std::snprintf(buf, sizeof buf, "potential evaluation failed at t = %.17g", t);
      finish(FlowTerminal::CenterCollision, buf);
      checkpoint(t);
      return trace;
    }

    const double dmin = detail::min_distance_to_centers(cur, config, obstacles);
    if (dmin < collision) {
      std::snprintf(buf, sizeof buf, "curve came within %.3g of a center at t = %.17g", dmin, t);
      finish(FlowTerminal::CenterCollision, buf);
      checkpoint(t);
      return trace;
    }
    // Extinction and blow-up can happen well inside one checkpoint interval, where dt ~ h^2
    // collapses; cheap per-step bounds force an early checkpoint instead.
    const bool early =
        (cur.closed() && detail::bounding_box_diagonal(cur.nodes) < ctl.extinction_tol * d0) ||
        st.max_lap_sq_over_phi * hull > ctl.singularity_threshold;
    const bool scheduled = !(t < next_cp);
    if (!scheduled && !early && trace.steps < ctl.max_steps) continue;

    // Checkpoint: resample, check topology, record diagnostics, decide termination.
    if (scheduled) next_cp += ctl.checkpoint_dt;
    cur = resample_uniform(cur, n);
    pin_endpoints(cur, config);
    if (auto hit = find_self_intersection(cur)) {
      std::snprintf(buf, sizeof buf, "edges %zu and %zu intersect at t = %.17g", hit->first,
                    hit->second, t);
      finish(FlowTerminal::SelfIntersection, buf);
      checkpoint(t);
      return trace;
    }
    const auto w = windings(cur);
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!cur.closed() && std::lround(w[i]) != std::lround(winding0[i])) {
        std::snprintf(buf, sizeof buf, "curve crossed center %d at t = %.17g", obstacles[i], t);
        finish(FlowTerminal::CenterCollision, buf);
        checkpoint(t);
        return trace;
      }
    const auto cp = checkpoint(t);
    const auto term = detect_convergence(cur, cp, ctl, d0, hull);
    if (term != FlowTerminal::Running) {
      finish(term, "");
      return trace;
    }
    if (t >= ctl.t_max - 1e-12 * ctl.t_max || trace.steps >= ctl.max_steps) {
      finish(FlowTerminal::MaxTime, trace.steps >= ctl.max_steps ? "step budget exhausted" : "");
      return trace;
    }
  }
}

}  // namespace ghlab
