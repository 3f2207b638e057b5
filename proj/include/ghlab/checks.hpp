// Numerical cross-checks of closed-form quantities, used by the hessian-check task.
#pragma once

#include "ghlab/monopole.hpp"

#include <functional>
#include <random>

namespace ghlab {

/// Frame Hessian Hess(e_a, e_b) = e_a(e_b f) - (nabla_{e_a} e_b) f of a circle-invariant f,
/// built from the connection coefficients with the outer derivative taken by central
/// differences of e_b f = phi^{-1/2} d_b f (step h).
inline Mat4 frame_hessian_fd(const MonopoleConfig& config, const Vec3& x,
                             const std::function<Vec3(const Vec3&)>& grad_f, double h = 1e-5) {
  const auto G = connection_coefficients(config, x);
  auto ef = [&](const Vec3& y, int b) {
    return b == 0 ? 0.0 : grad_f(y)[b - 1] / std::sqrt(phi(config, y));
  };
  const double scale = 1.0 / std::sqrt(phi(config, x));
  Mat4 H = Mat4::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double v = 0.0;
      if (a > 0) {
        Vec3 e = Vec3::Zero();
        e[a - 1] = h;
        v += scale * (ef(x + e, b) - ef(x - e, b)) / (2.0 * h);
      }
      for (int c = 0; c < 4; ++c) v -= G(a, b, c) * ef(x, c);
      H(a, b) = v;
    }
  return H;
}

enum class TestFunction { RadiusSquared, Generic };

struct HessianCheckRow {
  Vec3 x = Vec3::Zero();
  double relative_error = 0.0;
  double min_eigenvalue = 0.0;
};

/// Compares invariant_hessian with frame_hessian_fd at `n` random points of [-extent, extent]^3
/// that keep at least `margin` from every center. The generic test function is
/// mu1 sin(mu2) + mu3^2; the radius is measured from `origin`.
inline std::vector<HessianCheckRow> hessian_check(const MonopoleConfig& config, int n,
                                                  std::uint64_t seed, TestFunction fn,
                                                  const Vec3& origin = Vec3::Zero(),
                                                  double extent = 3.0, double margin = 0.2) {
  config.validate();
  require(n >= 0 && extent > 0.0 && margin > 0.0, ErrorKind::InvalidInput,
          "hessian check needs a non-negative point count and positive extent and margin");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<HessianCheckRow> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    require(++attempts < 1000 * (n + 1), ErrorKind::InvalidInput,
            "could not place sample points away from the centers");
    const Vec3 x(u(rng), u(rng), u(rng));
    bool clear = true;
    for (const auto& c : config.centers) clear = clear && (x - c.position).norm() > margin;
    if (!clear) continue;

    InvariantFunctionJet jet;
    std::function<Vec3(const Vec3&)> grad;
    if (fn == TestFunction::RadiusSquared) {
      jet = radius_squared_jet(x, origin);
      grad = [origin](const Vec3& y) -> Vec3 { return 2.0 * (y - origin); };
    } else {
      jet.value = x.x() * std::sin(x.y()) + x.z() * x.z();
      jet.hess << 0, std::cos(x.y()), 0, std::cos(x.y()), -x.x() * std::sin(x.y()), 0, 0, 0, 2;
      grad = [](const Vec3& y) -> Vec3 {
        return Vec3(std::sin(y.y()), y.x() * std::cos(y.y()), 2.0 * y.z());
      };
      jet.grad = grad(x);
    }
    const Mat4 H = invariant_hessian(config, x, jet);
    const Mat4 F = frame_hessian_fd(config, x, grad);
    out.push_back({x, (H - F).norm() / std::max(H.norm(), 1e-300),
                   symmetric_eigenvalues(H).minCoeff()});
  }
  return out;
}

}  // namespace ghlab
