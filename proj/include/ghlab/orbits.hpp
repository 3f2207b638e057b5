// Geodesic circle orbits, found as critical points of phi.
#pragma once

#include "ghlab/monopole.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

namespace ghlab {

struct SeedingControls {
  int grid_density = 25;
  double newton_tol = 1e-10;
  /// Merge radius for duplicate Newton limits; non-positive selects 1e-6 x hull diameter.
  double dedup_radius = -1.0;
  /// Relative eigenvalue magnitude below which a critical point is flagged degenerate.
  double degeneracy_tol = 1e-8;
  int max_newton_iterations = 80;
  /// Re-seed on a denser grid (up to this many times) while the Morse relation fails.
  int refinement_rounds = 2;
};

struct CriticalPointRecord {
  Vec3 location = Vec3::Zero();
  double residual = 0.0;
  int morse_index = 0;
  Vec3 eigenvalues = Vec3::Zero();
  double orbit_length = 0.0;
  int geodesic_index_lower_bound = 0;
  bool degenerate = false;
};

struct MorseIndex {
  int index = 0;
  Vec3 eigenvalues = Vec3::Zero();
  bool degenerate = false;
};

/// Index and spectrum of hess_phi without the criticality check.
inline MorseIndex hessian_signature(const MonopoleConfig& config, const Vec3& x,
                                    double degeneracy_tol = 1e-8) {
  MorseIndex out;
  out.eigenvalues = symmetric_eigenvalues(hess_phi(config, x));
  const double scale = out.eigenvalues.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    if (out.eigenvalues[i] < 0.0) ++out.index;
    if (std::abs(out.eigenvalues[i]) <= degeneracy_tol * scale) out.degenerate = true;
  }
  if (scale == 0.0) out.degenerate = true;
  return out;
}

/// Morse index of phi at a critical point. Throws NotCritical or DegenerateCritical.
inline MorseIndex morse_index(const MonopoleConfig& config, const Vec3& x, double tol = 1e-8,
                              double degeneracy_tol = 1e-8) {
  const double g = grad_phi(config, x).norm();
  require(g < tol, ErrorKind::NotCritical, "gradient of phi does not vanish at the given point");
  auto sig = hessian_signature(config, x, degeneracy_tol);
  require(!sig.degenerate, ErrorKind::DegenerateCritical, "critical point is degenerate");
  return sig;
}

/// Weights beta_i proportional to c_i / |x - p_i|^3 and the defect |x - sum beta_i p_i|.
/// At a critical point the defect vanishes, which exhibits x as a convex combination of centers.
struct HullRepresentation {
  std::vector<double> beta;
  double defect = 0.0;
};

inline HullRepresentation hull_representation(const MonopoleConfig& config, const Vec3& x) {
  HullRepresentation h;
  double total = 0.0;
  for (const auto& c : config.centers) {
    const double r = (x - c.position).norm();
    h.beta.push_back(c.charge / (r * r * r));
    total += h.beta.back();
  }
  Vec3 combo = Vec3::Zero();
  for (std::size_t i = 0; i < h.beta.size(); ++i) {
    h.beta[i] /= total;
    combo += h.beta[i] * config.centers[i].position;
  }
  h.defect = (x - combo).norm();
  return h;
}

inline CriticalPointRecord make_record(const MonopoleConfig& config, const Vec3& x,
                                       double degeneracy_tol = 1e-8) {
  CriticalPointRecord r;
  r.location = x;
  r.residual = grad_phi(config, x).norm();
  const auto sig = hessian_signature(config, x, degeneracy_tol);
  r.morse_index = sig.index;
  r.eigenvalues = sig.eigenvalues;
  r.degenerate = sig.degenerate;
  r.orbit_length = orbit_length(config, x);
  r.geodesic_index_lower_bound = 3 - sig.index;
  return r;
}

/// Damped Newton iteration on grad phi = 0. Returns nothing when the iterate fails to converge,
/// leaves the search box, or runs into a center.
inline std::optional<Vec3> newton_critical_point(const MonopoleConfig& config, Vec3 x,
                                                 const Vec3& box_lo, const Vec3& box_hi,
                                                 double tol, int max_iterations) {
  try {
    auto jet = potential_jet(config, x, 2);
    double gnorm = jet.grad.norm();
    // Iterate past tol until progress stalls; the extra steps are cheap and sharpen the location.
    for (int it = 0; it < max_iterations; ++it) {
      if (gnorm < 1e-4 * tol) return x;
      Eigen::FullPivLU<Mat3> lu(jet.hess);
      Vec3 step = lu.isInvertible() ? Vec3(-lu.solve(jet.grad)) : Vec3(-jet.grad);
      double lambda = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
        const Vec3 trial = x + lambda * step;
        if ((trial.array() < box_lo.array()).any() || (trial.array() > box_hi.array()).any())
          continue;
        PotentialJet tj;
        try {
          tj = potential_jet(config, trial, 2);
        } catch (const Error&) {
          continue;
        }
        const double tn = tj.grad.norm();
        if (tn < gnorm) {
          x = trial;
          jet = tj;
          gnorm = tn;
          accepted = true;
          break;
        }
      }
      if (!accepted) return gnorm < tol ? std::optional<Vec3>(x) : std::nullopt;
    }
    return gnorm < tol ? std::optional<Vec3>(x) : std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct MorseCount {
  int m1 = 0;
  int m2 = 0;
  bool satisfied = false;
};

/// Checks m2 - m1 = k - 1 and that at least k - 1 orbits were found. Throws DegeneratePresent.
inline MorseCount verify_morse_count(const std::vector<CriticalPointRecord>& records, int k) {
  MorseCount mc;
  for (const auto& r : records) {
    require(!r.degenerate, ErrorKind::DegeneratePresent,
            "a degenerate critical point makes the Morse count meaningless");
    if (r.morse_index == 1) ++mc.m1;
    if (r.morse_index == 2) ++mc.m2;
  }
  mc.satisfied = (mc.m2 - mc.m1 == k - 1) && static_cast<int>(records.size()) >= k - 1;
  return mc;
}

namespace detail {

inline std::vector<CriticalPointRecord> seed_and_solve(const MonopoleConfig& config,
                                                       const SeedingControls& ctl, int density,
                                                       double dedup) {
  Vec3 lo = config.centers.front().position, hi = lo;
  for (const auto& c : config.centers) {
    lo = lo.cwiseMin(c.position);
    hi = hi.cwiseMax(c.position);
  }
  const double diam = config.hull_diameter();
  const Vec3 pad = Vec3::Constant(0.1 * diam + dedup);
  const Vec3 seed_lo = lo - pad, seed_hi = hi + pad;
  const Vec3 box_lo = lo - 2.0 * pad, box_hi = hi + 2.0 * pad;

  std::vector<Vec3> seeds;
  const int n = std::max(density, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 f(i / double(n - 1), j / double(n - 1), l / double(n - 1));
        seeds.push_back(seed_lo + f.cwiseProduct(seed_hi - seed_lo));
      }
  // Saddles sit between centers, so the pairwise segments are worth sampling densely.
  for (std::size_t a = 0; a < config.size(); ++a)
    for (std::size_t b = a + 1; b < config.size(); ++b)
      for (int s = 1; s < 2 * n; ++s) {
        const double t = s / double(2 * n);
        seeds.push_back((1 - t) * config.position(a) + t * config.position(b));
      }

  std::vector<Vec3> found;
  for (const auto& s : seeds) {
    auto x = newton_critical_point(config, s, box_lo, box_hi, ctl.newton_tol,
                                   ctl.max_newton_iterations);
    if (!x) continue;
    bool dup = false;
    for (const auto& f : found)
      if ((f - *x).norm() < dedup) {
        dup = true;
        break;
      }
    if (!dup) found.push_back(*x);
  }
  std::sort(found.begin(), found.end(), [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  std::vector<CriticalPointRecord> out;
  for (const auto& x : found) out.push_back(make_record(config, x, ctl.degeneracy_tol));
  return out;
}

}  // namespace detail

/// Grid-seeded Newton search over the inflated hull of the centers. Records are sorted
/// lexicographically by location. Throws NoCriticalPoints for a single center.
inline std::vector<CriticalPointRecord> find_critical_points(const MonopoleConfig& config,
                                                             const SeedingControls& ctl = {}) {
  config.validate();
  require(!config.periodic(), ErrorKind::InvalidInput,
          "critical point search needs a finite configuration");
  require(!config.centers.empty(), ErrorKind::InvalidInput, "configuration has no centers");
  require(config.size() >= 2, ErrorKind::NoCriticalPoints,
          "a single center has no geodesic orbits");
  const double dedup =
      ctl.dedup_radius > 0.0 ? ctl.dedup_radius : 1e-6 * config.hull_diameter();
  const int k = static_cast<int>(config.size());
  int density = ctl.grid_density;
  auto records = detail::seed_and_solve(config, ctl, density, dedup);
  for (int round = 0; round < ctl.refinement_rounds; ++round) {
    bool degenerate = std::any_of(records.begin(), records.end(),
                                  [](const auto& r) { return r.degenerate; });
    if (degenerate || verify_morse_count(records, k).satisfied) break;
    density = density * 8 / 5;
    records = detail::seed_and_solve(config, ctl, density, dedup);
  }
  return records;
}

/// Positive root b of f(mu) = (mu^2 + 3a^2)^{3/2} - 2 mu (mu - 3a)^2 below the root mu = a.
inline double triangle_root(double a) {
  require(a > 0.0, ErrorKind::InvalidInput, "triangle size must be positive");
  auto f = [a](double mu) {
    return std::pow(mu * mu + 3.0 * a * a, 1.5) - 2.0 * mu * (mu - 3.0 * a) * (mu - 3.0 * a);
  };
  double neg = -1.0;
  const int samples = 1000;
  for (int i = 1; i < samples; ++i) {
    const double mu = a * i / samples;
    if (f(mu) < 0.0) {
      neg = mu;
      break;
    }
  }
  require(neg > 0.0 && f(0.0) > 0.0, ErrorKind::RootNotBracketed,
          "no sign change of f found in (0, a)");
  double lo = 0.0, hi = neg;
  while (hi - lo > 1e-12 * a) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline MonopoleConfig triangle_config(double a, double m = 0.0) {
  const double s = std::sqrt(3.0) * a;
  return MonopoleConfig::finite(m, {Vec3(-s, 0, 0), Vec3(s, 0, 0), Vec3(0, 3 * a, 0)});
}

/// The four geodesic orbits of the equilateral configuration: the centroid p = (0, a, 0) first,
/// then q = (0, b, 0) and its rotations by 2 pi / 3 about p.
inline std::array<CriticalPointRecord, 4> triangle_orbits(double a, double m = 0.0) {
  const auto config = triangle_config(a, m);
  const double b = triangle_root(a);
  const Vec3 p(0, a, 0);
  std::array<CriticalPointRecord, 4> out;
  out[0] = make_record(config, p);
  for (int k = 0; k < 3; ++k) {
    const double ang = two_pi * k / 3.0;
    const Vec3 d(0, b - a, 0);
    const Vec3 rotated(std::cos(ang) * d.x() - std::sin(ang) * d.y(),
                       std::sin(ang) * d.x() + std::cos(ang) * d.y(), 0.0);
    out[k + 1] = make_record(config, p + rotated);
  }
  return out;
}

/// Critical point of the periodic potential on the axis segment (0, 2 pi), by bisection on d1 phi.
inline Vec3 ov_axis_orbit(const MonopoleConfig& config) {
  require(config.periodic(), ErrorKind::InvalidInput, "axis orbit needs a periodic configuration");
  auto d1 = [&](double x) { return grad_phi(config, Vec3(x, 0, 0)).x(); };
  double lo = 1e-3, hi = two_pi - 1e-3;
  require(d1(lo) < 0.0 && d1(hi) > 0.0, ErrorKind::RootNotBracketed,
          "axis derivative does not change sign on the fundamental segment");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (d1(mid) < 0.0 ? lo : hi) = mid;
  }
  return Vec3(0.5 * (lo + hi), 0.0, 0.0);
}

}  // namespace ghlab
