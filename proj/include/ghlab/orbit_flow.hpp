// The circle-invariant curve shortening flow restricted to single orbits:
//
//     dx/dt = grad phi / (2 phi^2),
//
// which moves each fibre in the direction that shrinks its length phi^{-1/2}.
#pragma once

#include "ghlab/ode.hpp"
#include "ghlab/orbits.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace ghlab {

/// Velocity of the orbit flow at x.
inline Vec3 orbit_velocity(const MonopoleConfig& config, const Vec3& x) {
  const auto jet = potential_jet(config, x, 1);
  return jet.grad / (2.0 * jet.value * jet.value);
}

struct OrbitFlowControls {
  double dt = 1e-3;  // initial step
  double tol = 1e-10;
  double t_max = 100.0;
  /// Stop radius around centers; non-positive selects 1e-6 x hull diameter.
  double capture_radius = -1.0;
};

struct OrbitSample {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  double phi = 0.0;
};

enum class OrbitTerminal { ReachedCenter, NearCriticalPoint, MaxTime };

inline const char* to_string(OrbitTerminal t) {
  switch (t) {
    case OrbitTerminal::ReachedCenter: return "ReachedCenter";
    case OrbitTerminal::NearCriticalPoint: return "NearCriticalPoint";
    case OrbitTerminal::MaxTime: return "MaxTime";
  }
  return "Unknown";
}

struct OrbitTrajectory {
  std::vector<OrbitSample> samples;
  OrbitTerminal terminal = OrbitTerminal::MaxTime;
  int center_index = -1;
  std::optional<CriticalPointRecord> critical;
  OdeStats stats;
  /// True when phi never decreased (relative slack 1e-10) between consecutive samples.
  bool phi_nondecreasing = true;
};

inline OrbitTrajectory orbit_flow(const MonopoleConfig& config, const Vec3& x0,
                                  const OrbitFlowControls& ctl = {}) {
  config.validate();
  require(x0.allFinite(), ErrorKind::InvalidInput, "initial point must be finite");
  const double diam = config.hull_diameter();
  const double capture = ctl.capture_radius > 0.0 ? ctl.capture_radius : 1e-6 * diam;

  OrbitTrajectory traj;
  traj.samples.push_back({0.0, x0, phi(config, x0)});

  auto nearest_center = [&](const Vec3& x) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < config.size(); ++i) {
      const double d = (x - config.position(i)).norm();
      if (d < dist) {
        dist = d;
        best = static_cast<int>(i);
      }
    }
    return std::pair{best, dist};
  };

  // Stages that land inside the exclusion radius yield NaN, which forces a step rejection.
  auto rhs = [&](double, const Vec3& x) -> Vec3 {
    try {
      return orbit_velocity(config, x);
    } catch (const Error&) {
      return Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
    }
  };

  auto observe = [&](double t, const Vec3& x) {
    const auto [ci, cd] = nearest_center(x);
    const auto jet = potential_jet(config, x, 1);
    const double p = jet.value;
    if (p < traj.samples.back().phi * (1.0 - 1e-10)) traj.phi_nondecreasing = false;
    traj.samples.push_back({t, x, p});
    if (ci >= 0 && cd < capture) {
      traj.terminal = OrbitTerminal::ReachedCenter;
      traj.center_index = ci;
      return true;
    }
    if (jet.grad.norm() / (p * p) < ctl.tol) {
      traj.terminal = OrbitTerminal::NearCriticalPoint;
      return true;
    }
    return false;
  };

  OdeControls oc;
  oc.dt0 = ctl.dt;
  oc.rtol = ctl.tol;
  oc.atol = ctl.tol * diam;
  oc.dt_min = 1e-14 * std::max(1.0, ctl.t_max);

  const auto [ci0, cd0] = nearest_center(x0);
  if (ci0 >= 0 && cd0 < capture) {
    traj.terminal = OrbitTerminal::ReachedCenter;
    traj.center_index = ci0;
    return traj;
  }
  Vec3 y = x0;
  integrate_dopri5(rhs, y, 0.0, ctl.t_max, oc, observe, &traj.stats);

  if (traj.terminal == OrbitTerminal::NearCriticalPoint) {
    const Vec3 pad = Vec3::Constant(diam);
    if (auto x = newton_critical_point(config, y, y - pad, y + pad, 1e-10, 60))
      traj.critical = make_record(config, *x);
  }
  return traj;
}

enum class RestPointKind { Attractor, Unstable };

struct RestPointClass {
  RestPointKind kind = RestPointKind::Attractor;
  int center_index = -1;
  /// For unstable points: an eigen-direction of hess_phi along which phi grows.
  Vec3 escape_direction = Vec3::Zero();
  double escape_eigenvalue = 0.0;
};

/// Centers attract every nearby orbit; critical points of phi are unstable because phi is
/// harmonic, so its Hessian always has a positive eigenvalue.
inline RestPointClass classify_rest_point(const MonopoleConfig& config, const Vec3& x,
                                          double tol = 1e-8) {
  const double diam = config.hull_diameter();
  for (std::size_t i = 0; i < config.size(); ++i)
    if ((x - config.position(i)).norm() <= std::max(tol * diam, config.exclusion_radius))
      return {RestPointKind::Attractor, static_cast<int>(i), Vec3::Zero(), 0.0};
  const auto jet = potential_jet(config, x, 2);
  require(jet.grad.norm() < tol * std::max(1.0, std::abs(jet.value)), ErrorKind::NotRestPoint,
          "point is neither a center nor a critical point of phi");
  Eigen::SelfAdjointEigenSolver<Mat3> es(jet.hess);
  const double top = es.eigenvalues()[2];
  require(top > 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff() && top > 0.0,
          ErrorKind::DegenerateCritical, "no direction of growth of phi found");
  return {RestPointKind::Unstable, -1, es.eigenvectors().col(2), top};
}

// ---------------------------------------------------------------------------------------------
// Phase portraits

struct PortraitGrid {
  int n_u = 21;
  int n_w = 21;
  /// Half-width of the square window [-extent, extent]^2 in plane coordinates.
  double extent = 2.0;
};

struct PortraitSample {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double normal_velocity = 0.0;
  double phi = 0.0;
  bool singular = false;
};

enum class PlanarType { Center, Source, Sink, Saddle, Inconclusive };

inline const char* to_string(PlanarType t) {
  switch (t) {
    case PlanarType::Center: return "center";
    case PlanarType::Source: return "source";
    case PlanarType::Sink: return "sink";
    case PlanarType::Saddle: return "saddle";
    case PlanarType::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct PortraitRestPoint {
  Vec2 position = Vec2::Zero();
  PlanarType type = PlanarType::Inconclusive;
  Vec2 in_plane_eigenvalues = Vec2::Zero();
};

struct PhasePortrait {
  Plane plane;
  PortraitGrid grid;
  std::vector<PortraitSample> samples;  // row-major, w slowest
  std::vector<PortraitRestPoint> rest_points;
};

/// Eigenvalues of hess_phi restricted to the plane; positive pairs mark sources of the flow.
inline PortraitRestPoint classify_in_plane(const MonopoleConfig& config, const Plane& plane,
                                           const Vec3& x) {
  Eigen::Matrix<double, 3, 2> B;
  B.col(0) = plane.u;
  B.col(1) = plane.w;
  const Eigen::Matrix2d R = B.transpose() * hess_phi(config, x) * B;
  const Vec2 ev = symmetric_eigenvalues(Eigen::Matrix2d(0.5 * (R + R.transpose())));
  PortraitRestPoint rp;
  rp.position = plane.project(x);
  rp.in_plane_eigenvalues = ev;
  const double scale = ev.cwiseAbs().maxCoeff();
  if (scale == 0.0 || std::abs(ev[0]) < 1e-8 * scale || std::abs(ev[1]) < 1e-8 * scale)
    rp.type = PlanarType::Inconclusive;
  else if (ev[0] > 0.0)
    rp.type = PlanarType::Source;
  else if (ev[1] < 0.0)
    rp.type = PlanarType::Sink;
  else
    rp.type = PlanarType::Saddle;
  return rp;
}

inline PhasePortrait phase_portrait(const MonopoleConfig& config, const Plane& plane,
                                    const PortraitGrid& grid = {}) {
  config.validate();
  require(grid.n_u >= 2 && grid.n_w >= 2 && grid.extent > 0.0, ErrorKind::InvalidInput,
          "portrait grid needs at least 2 x 2 nodes and a positive extent");
  PhasePortrait out{plane, grid, {}, {}};
  const Vec3 n = plane.normal();
  for (int j = 0; j < grid.n_w; ++j)
    for (int i = 0; i < grid.n_u; ++i) {
      PortraitSample s;
      s.position = Vec2(-grid.extent + 2.0 * grid.extent * i / (grid.n_u - 1),
                        -grid.extent + 2.0 * grid.extent * j / (grid.n_w - 1));
      try {
        const Vec3 x = plane.to3d(s.position);
        const auto jet = potential_jet(config, x, 1);
        const Vec3 v = jet.grad / (2.0 * jet.value * jet.value);
        s.velocity = Vec2(v.dot(plane.u), v.dot(plane.w));
        s.normal_velocity = v.dot(n);
        s.phi = jet.value;
      } catch (const Error&) {
        s.singular = true;
      }
      out.samples.push_back(s);
    }

  const double tol = 1e-9 * config.hull_diameter();
  for (const auto& c : config.centers)
    if (plane.distance(c.position) < tol)
      out.rest_points.push_back({plane.project(c.position), PlanarType::Center, Vec2::Zero()});
  if (!config.periodic() && config.size() >= 2) {
    for (const auto& rec : find_critical_points(config))
      if (plane.distance(rec.location) < 1e-7 * config.hull_diameter())
        out.rest_points.push_back(classify_in_plane(config, plane, rec.location));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Closed-form radial solutions

enum class RadialKind { Flat, TaubNUT };

/// Radius at time t of an orbit over a single center: r0 - t in the flat case, and the positive
/// root of (1 + 2 m r)^3 = (1 + 2 m r0)^3 - 6 m t for Taub-NUT. Throws PastExtinction.
inline double reference_radial_solution(RadialKind kind, double r0, double t, double m = 0.0) {
  require(r0 > 0.0 && t >= 0.0 && std::isfinite(t), ErrorKind::InvalidInput,
          "radial solution needs r0 > 0 and t >= 0");
  if (kind == RadialKind::Flat || m == 0.0) {
    require(t <= r0, ErrorKind::PastExtinction, "orbit has already collapsed into the center");
    return r0 - t;
  }
  require(m > 0.0, ErrorKind::InvalidInput, "Taub-NUT mass must be positive");
  // (1 + 2 m r)^3 - 1, expanded so that small m does not cancel catastrophically.
  const double mr = m * r0;
  const double delta = 6.0 * mr + 12.0 * mr * mr + 8.0 * mr * mr * mr - 6.0 * m * t;
  require(delta >= -1e-15, ErrorKind::PastExtinction,
          "orbit has already collapsed into the center");
  return std::max(0.0, std::expm1(std::log1p(std::max(delta, 0.0)) / 3.0) / (2.0 * m));
}

}  // namespace ghlab
