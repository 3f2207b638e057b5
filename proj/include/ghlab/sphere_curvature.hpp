// Gauss curvature of the invariant minimal sphere over a straight chord between two centers.
//
// Along the chord, with mu the coordinate from the midpoint (endpoints at -a and +a), write
// phi = phi~ + c_i / (2 (a + mu)) + c_j / (2 (a - mu)) where phi~ collects the mass and the other
// centers. Then 1/phi = w / E with w = a^2 - mu^2 and E = phi~ w + (c_i (a - mu) + c_j (a + mu)) / 2,
// and the curvature of the sphere is K = -(1/2) d^2(1/phi)/dmu^2.
#pragma once

#include "ghlab/monopole.hpp"

#include <gsl/gsl_integration.h>

#include <limits>
#include <memory>
#include <optional>

namespace ghlab {

struct Chord {
  int i = 0;
  int j = 1;
};

struct CurvatureSample {
  double mu = 0.0;
  double weight = 0.0;  // quadrature weight
  double K = 0.0;
  /// Split of d^2(1/phi)/dmu^2 into a negative part N and a mixed-sign part M (unit endpoint
  /// charges only; NaN otherwise).
  double M = std::numeric_limits<double>::quiet_NaN();
  double N = std::numeric_limits<double>::quiet_NaN();
};

struct CurvatureProfile {
  Chord chord;
  double half_length = 0.0;
  std::vector<CurvatureSample> samples;
  double min_K = 0.0;
  /// Integral of K over the sphere, 2 pi times the integral of K over the chord.
  double gauss_bonnet_integral = 0.0;
};

struct TildePhiBounds {
  double grad = 0.0;             // d phi~ / dmu
  double grad_bound = 0.0;       // sum c / (2 r^2)
  double axis_second_deriv = 0.0;  // sum c / r^3
  double second_deriv = 0.0;     // exact d^2 phi~ / dmu^2
  bool grad_bound_holds = true;
};

struct PositivityCertificate {
  double s = std::numeric_limits<double>::infinity();
  double threshold = 4.0;
  bool hypothesis_met = true;
  /// Set when the hypothesis holds: whether the computed profile is positive everywhere.
  std::optional<bool> verified_positive;
  double min_K = 0.0;
};

namespace detail {

// The chord in its own frame: other centers as (t, rho, charge) with t along the chord from the
// midpoint and rho the distance from the chord's line.
struct ChordFrame {
  double a = 0.0;
  double ci = 1.0, cj = 1.0;
  double mass = 0.0;
  Vec3 midpoint = Vec3::Zero();
  std::vector<std::array<double, 3>> others;

  struct Jet {
    double v, d1, d2;
  };

  Jet tilde_phi(double mu) const {
    Jet j{mass, 0.0, 0.0};
    for (const auto& [t, rho, c] : others) {
      const double x = mu - t;
      const double r2 = x * x + rho * rho;
      const double r = std::sqrt(r2);
      j.v += c / (2.0 * r);
      j.d1 -= c * x / (2.0 * r2 * r);
      j.d2 += c * (2.0 * x * x - rho * rho) / (2.0 * r2 * r2 * r);
    }
    return j;
  }
};

inline ChordFrame chord_frame(const MonopoleConfig& config, Chord chord) {
  config.validate();
  require(!config.periodic(), ErrorKind::InvalidInput,
          "chord curvature is implemented for finite configurations");
  const int k = static_cast<int>(config.size());
  require(chord.i >= 0 && chord.i < k && chord.j >= 0 && chord.j < k && chord.i != chord.j,
          ErrorKind::InvalidInput, "chord must join two distinct centers");
  const Vec3 pi_ = config.position(chord.i), pj = config.position(chord.j);
  ChordFrame f;
  const Vec3 e = (pj - pi_).normalized();
  f.a = 0.5 * (pj - pi_).norm();
  f.midpoint = 0.5 * (pi_ + pj);
  f.mass = config.mass;
  f.ci = config.centers[chord.i].charge;
  f.cj = config.centers[chord.j].charge;
  for (int l = 0; l < k; ++l) {
    if (l == chord.i || l == chord.j) continue;
    const Vec3 d = config.position(l) - f.midpoint;
    const double t = d.dot(e);
    const double rho = (d - t * e).norm();
    require(!(rho <= 1e-12 * f.a && std::abs(t) < f.a), ErrorKind::ChordThroughCenter,
            "another center lies on the chord");
    f.others.push_back({t, rho, static_cast<double>(config.centers[l].charge)});
  }
  return f;
}

// K, M, N at one interior point.
inline CurvatureSample curvature_at(const ChordFrame& f, double mu) {
  const auto p = f.tilde_phi(mu);
  const double a = f.a;
  const double w = a * a - mu * mu, w1 = -2.0 * mu, w2 = -2.0;
  const double E = p.v * w + 0.5 * (f.ci * (a - mu) + f.cj * (a + mu));
  const double E1 = p.d1 * w + p.v * w1 + 0.5 * (f.cj - f.ci);
  const double E2 = p.d2 * w + 2.0 * p.d1 * w1 + p.v * w2;
  // (w / E)'' = (w'' E - w E'') / E^2 - 2 E' (w' E - w E') / E^3
  const double psi2 = (w2 * E - w * E2) / (E * E) - 2.0 * E1 * (w1 * E - w * E1) / (E * E * E);
  CurvatureSample s;
  s.mu = mu;
  s.K = -0.5 * psi2;
  if (f.ci == 1.0 && f.cj == 1.0) {
    const double D3 = E * E * E;
    s.N = -(2.0 * a * a + 2.0 * a * p.v * w + 8.0 * a * p.v * mu * mu + a * p.d2 * w * w +
            p.v * p.d2 * w * w * w) /
          D3;
    s.M = (2.0 * p.d1 * p.d1 * w * w * w + 8.0 * a * mu * p.d1 * w) / D3;
  }
  return s;
}

}  // namespace detail

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
inline std::vector<std::pair<double, double>> gauss_legendre(std::size_t n) {
  require(n >= 1, ErrorKind::InvalidInput, "quadrature needs at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  require(table != nullptr, ErrorKind::InvalidInput, "quadrature table allocation failed");
  std::vector<std::pair<double, double>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, i, &out[i].first, &out[i].second, table.get());
  std::sort(out.begin(), out.end());
  return out;
}

/// Curvature profile at Gauss-Legendre nodes on (-a + eps, a - eps) with eps = 1e-6 a; the two
/// end slivers are added to the Gauss-Bonnet integral by the midpoint rule.
inline CurvatureProfile gauss_curvature(const MonopoleConfig& config, Chord chord,
                                        std::size_t n_samples = 2000) {
  const auto f = detail::chord_frame(config, chord);
  CurvatureProfile prof;
  prof.chord = chord;
  prof.half_length = f.a;
  const double eps = 1e-6 * f.a, half = f.a - eps;
  prof.min_K = std::numeric_limits<double>::infinity();
  double integral = 0.0;
  for (const auto& [x, wgt] : gauss_legendre(n_samples)) {
    auto s = detail::curvature_at(f, half * x);
    s.weight = half * wgt;
    integral += s.weight * s.K;
    prof.min_K = std::min(prof.min_K, s.K);
    prof.samples.push_back(s);
  }
  for (double mid : {-f.a + 0.5 * eps, f.a - 0.5 * eps})
    integral += eps * detail::curvature_at(f, mid).K;
  prof.gauss_bonnet_integral = two_pi * integral;
  return prof;
}

/// Derivatives of phi~ along the chord at mu, with the gradient bound and the second-derivative
/// expression sum c / r^3 that holds exactly for centers on the chord's line.
inline TildePhiBounds tilde_phi_bounds(const MonopoleConfig& config, Chord chord, double mu) {
  const auto f = detail::chord_frame(config, chord);
  require(std::abs(mu) < f.a, ErrorKind::InvalidInput, "mu must lie inside the chord");
  const auto j = f.tilde_phi(mu);
  TildePhiBounds b;
  b.grad = j.d1;
  b.second_deriv = j.d2;
  for (const auto& [t, rho, c] : f.others) {
    const double r2 = (mu - t) * (mu - t) + rho * rho;
    b.grad_bound += c / (2.0 * r2);
    b.axis_second_deriv += c / (r2 * std::sqrt(r2));
  }
  b.grad_bound_holds = std::abs(b.grad) <= b.grad_bound * (1.0 + 1e-14);
  return b;
}

/// s = (distance from the chord midpoint to the nearest other center) / (half chord length);
/// the hypothesis is s > max(4, sqrt((k - 2) / 2)). When it holds the profile is computed and
/// its positivity recorded.
inline PositivityCertificate positivity_certificate(const MonopoleConfig& config, Chord chord,
                                                    std::size_t n_samples = 2000) {
  const auto f = detail::chord_frame(config, chord);
  PositivityCertificate c;
  const double k = static_cast<double>(config.size());
  c.threshold = std::max(4.0, std::sqrt((k - 2.0) / 2.0));
  for (const auto& [t, rho, q] : f.others) c.s = std::min(c.s, std::hypot(t, rho) / f.a);
  c.hypothesis_met = c.s > c.threshold;
  if (c.hypothesis_met) {
    const auto prof = gauss_curvature(config, chord, n_samples);
    c.min_K = prof.min_K;
    c.verified_positive = prof.min_K > 0.0;
  }
  return c;
}

}  // namespace ghlab
