// Harmonic potentials of Gibbons-Hawking type and the geometric quantities derived from them.
//
// All quantities are expressed in the base coordinates (mu1, mu2, mu3); the connection form of
// the circle bundle never appears. Normalization everywhere is
//
//     phi(x) = m + sum_i c_i / (2 |x - p_i|).
#pragma once

#include "ghlab/core.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <variant>
#include <vector>

namespace ghlab {

struct Center {
  Vec3 position = Vec3::Zero();
  int charge = 1;
};

struct FiniteMode {};

/// Ooguri-Vafa periodic configuration: every listed center is repeated at p + (2 pi k, 0, 0).
struct PeriodicOV {
  int truncation_order = 200;
  /// Adds the l = 2, 4 multipole expansion of the discarded image pairs.
  bool tail_correction = true;
};

using Mode = std::variant<FiniteMode, PeriodicOV>;

/// pi m = log(4 pi) - gamma_Euler.
inline double default_ov_mass() {
  return (std::log(4.0 * pi) - std::numbers::egamma) / pi;
}

struct MonopoleConfig {
  double mass = 0.0;
  std::vector<Center> centers;
  Mode mode = FiniteMode{};
  /// Evaluations closer than this to a center are refused.
  double exclusion_radius = 1e-9;

  bool periodic() const { return std::holds_alternative<PeriodicOV>(mode); }

  std::size_t size() const { return centers.size(); }

  const Vec3& position(std::size_t i) const { return centers.at(i).position; }

  /// Largest pairwise distance between centers; 1 when there are fewer than two.
  double hull_diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i)
      for (std::size_t j = i + 1; j < centers.size(); ++j)
        d = std::max(d, (centers[i].position - centers[j].position).norm());
    return d > 0.0 ? d : 1.0;
  }

  void validate() const {
    require(std::isfinite(mass) && (mass >= 0.0 || periodic()), ErrorKind::InvalidInput,
            "mass must be finite and non-negative");
    require(exclusion_radius > 0.0, ErrorKind::InvalidInput, "exclusion radius must be positive");
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const auto& c = centers[i];
      require(c.position.allFinite(), ErrorKind::InvalidInput, "center coordinates must be finite");
      require(c.charge > 0, ErrorKind::InvalidInput, "center charges must be positive integers");
      for (std::size_t j = 0; j < i; ++j)
        require((centers[j].position - c.position).norm() > exclusion_radius,
                ErrorKind::InvalidInput, "center positions must be pairwise distinct");
    }
    if (const auto* ov = std::get_if<PeriodicOV>(&mode))
      require(ov->truncation_order >= 1, ErrorKind::InvalidInput,
              "periodic truncation order must be positive");
  }

  static MonopoleConfig finite(double m, std::vector<Vec3> points) {
    MonopoleConfig cfg;
    cfg.mass = m;
    for (auto& p : points) cfg.centers.push_back({p, 1});
    cfg.validate();
    return cfg;
  }

  /// Ooguri-Vafa: one unit charge at the origin plus its images, mass from the standard convention.
  static MonopoleConfig ooguri_vafa(int truncation_order, bool tail_correction = true) {
    MonopoleConfig cfg;
    cfg.mass = default_ov_mass();
    cfg.centers.push_back({Vec3::Zero(), 1});
    cfg.mode = PeriodicOV{truncation_order, tail_correction};
    cfg.validate();
    return cfg;
  }
};

/// Value, Euclidean gradient and Euclidean Hessian of phi at one point.
struct PotentialJet {
  double value = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

namespace detail {

inline void add_coulomb(PotentialJet& jet, const Vec3& d, double charge, int order,
                        double exclusion) {
  const double r2 = d.squaredNorm();
  const double r = std::sqrt(r2);
  if (r < exclusion)
    throw Error(ErrorKind::EvaluationAtCenter, "point lies within the exclusion radius of a center");
  jet.value += 0.5 * charge / r;
  if (order < 1) return;
  const double r3 = r2 * r;
  jet.grad -= (0.5 * charge / r3) * d;
  if (order < 2) return;
  const double f = 0.5 * charge / (r3 * r2);
  for (int i = 0; i < 3; ++i) {
    jet.hess(i, i) += f * (3.0 * d[i] * d[i] - r2);
    for (int j = i + 1; j < 3; ++j) {
      const double v = f * 3.0 * d[i] * d[j];
      jet.hess(i, j) += v;
      jet.hess(j, i) += v;
    }
  }
}

// sum_{k > n} k^{-s} for s = 3, 5 via zeta(s) minus the partial sum (summed small-to-large).
inline double zeta_tail(int s, int n) {
  static constexpr double zeta3 = 1.2020569031595942854;
  static constexpr double zeta5 = 1.0369277551433699263;
  double partial = 0.0;
  for (int k = n; k >= 1; --k) partial += std::pow(static_cast<double>(k), -s);
  return (s == 3 ? zeta3 : zeta5) - partial;
}

// Multipole expansion of the image pairs k > n about a center (harmonic polynomials of degree 2, 4).
inline void add_ov_tail(PotentialJet& jet, const Vec3& y, double charge, int n, int order) {
  const double c2 = charge * zeta_tail(3, n) / std::pow(two_pi, 3);
  const double c4 = charge * zeta_tail(5, n) / std::pow(two_pi, 5);
  const double y1 = y.x(), y2 = y.y(), y3 = y.z();
  const double rho2 = y2 * y2 + y3 * y3;
  const double h2 = y1 * y1 - 0.5 * rho2;
  const double h4 = y1 * y1 * y1 * y1 - 3.0 * y1 * y1 * rho2 + 0.375 * rho2 * rho2;
  jet.value += c2 * h2 + c4 * h4;
  if (order < 1) return;
  const Vec3 g2(2.0 * y1, -y2, -y3);
  const Vec3 g4(4.0 * y1 * y1 * y1 - 6.0 * y1 * rho2, (-6.0 * y1 * y1 + 1.5 * rho2) * y2,
                (-6.0 * y1 * y1 + 1.5 * rho2) * y3);
  jet.grad += c2 * g2 + c4 * g4;
  if (order < 2) return;
  Mat3 H2 = Vec3(2.0, -1.0, -1.0).asDiagonal();
  Mat3 H4;
  H4(0, 0) = 12.0 * y1 * y1 - 6.0 * rho2;
  H4(0, 1) = H4(1, 0) = -12.0 * y1 * y2;
  H4(0, 2) = H4(2, 0) = -12.0 * y1 * y3;
  H4(1, 1) = -6.0 * y1 * y1 + 1.5 * rho2 + 3.0 * y2 * y2;
  H4(2, 2) = -6.0 * y1 * y1 + 1.5 * rho2 + 3.0 * y3 * y3;
  H4(1, 2) = H4(2, 1) = 3.0 * y2 * y3;
  jet.hess += c2 * H2 + c4 * H4;
}

}  // namespace detail

/// Term-wise closed-form jet of phi up to the requested derivative order (0, 1 or 2).
inline PotentialJet potential_jet(const MonopoleConfig& config, const Vec3& x, int order = 2) {
  PotentialJet jet;
  jet.value = config.mass;
  if (const auto* ov = std::get_if<PeriodicOV>(&config.mode)) {
    const int n = ov->truncation_order;
    for (const auto& c : config.centers) {
      const Vec3 y = x - c.position;
      detail::add_coulomb(jet, y, c.charge, order, config.exclusion_radius);
      for (int k = 1; k <= n; ++k) {
        const Vec3 shift(two_pi * k, 0.0, 0.0);
        detail::add_coulomb(jet, y - shift, c.charge, order, config.exclusion_radius);
        detail::add_coulomb(jet, y + shift, c.charge, order, config.exclusion_radius);
        jet.value -= c.charge / (two_pi * k);
      }
      if (ov->tail_correction) detail::add_ov_tail(jet, y, c.charge, n, order);
    }
    if (!(jet.value > 0.0))
      throw Error(ErrorKind::NonpositivePhi, "truncated periodic potential is not positive here");
  } else {
    for (const auto& c : config.centers)
      detail::add_coulomb(jet, x - c.position, c.charge, order, config.exclusion_radius);
  }
  return jet;
}

inline double phi(const MonopoleConfig& config, const Vec3& x) {
  return potential_jet(config, x, 0).value;
}

inline Vec3 grad_phi(const MonopoleConfig& config, const Vec3& x) {
  return potential_jet(config, x, 1).grad;
}

inline Mat3 hess_phi(const MonopoleConfig& config, const Vec3& x) {
  return potential_jet(config, x, 2).hess;
}

/// Length of the circle orbit over x: phi^{-1/2}.
inline double orbit_length(const MonopoleConfig& config, const Vec3& x) {
  return 1.0 / std::sqrt(phi(config, x));
}

/// Levi-Civita coefficients in the orthonormal frame e_0 (fibre), e_1..e_3 (horizontal lifts of
/// phi^{-1/2} d/dmu_i): gamma[a][b][c] is the e_c component of nabla_{e_a} e_b.
struct ConnectionCoeffs {
  std::array<std::array<std::array<double, 4>, 4>, 4> gamma{};

  double operator()(int a, int b, int c) const { return gamma[a][b][c]; }
};

inline double levi_civita(int i, int j, int k) {
  return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

inline ConnectionCoeffs connection_coefficients(const MonopoleConfig& config, const Vec3& x) {
  const auto jet = potential_jet(config, x, 1);
  const double s = 0.5 / std::pow(jet.value, 1.5);
  const Vec3& g = jet.grad;
  ConnectionCoeffs cc;
  auto& G = cc.gamma;
  for (int i = 1; i <= 3; ++i) {
    G[0][0][i] = s * g[i - 1];
    G[0][i][0] = -s * g[i - 1];
    for (int k = 1; k <= 3; ++k) {
      double rot = 0.0;  // eps_ijk d_j phi
      for (int j = 1; j <= 3; ++j) rot += levi_civita(i, j, k) * g[j - 1];
      G[i][0][k] = s * rot;
      G[0][i][k] = s * rot;
    }
    for (int j = 1; j <= 3; ++j) {
      double e0 = 0.0;  // eps_ijk d_k phi
      for (int k = 1; k <= 3; ++k) e0 += levi_civita(i, j, k) * g[k - 1];
      G[i][j][0] = s * e0;
      for (int l = 1; l <= 3; ++l)
        G[i][j][l] = s * ((i == l ? g[j - 1] : 0.0) - (i == j ? g[l - 1] : 0.0));
    }
  }
  return cc;
}

/// Derivatives, with respect to mu, of a circle-invariant function at a point.
struct InvariantFunctionJet {
  double value = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();
};

/// Frame Hessian (e_0, e_1, e_2, e_3) of a circle-invariant function.
inline Mat4 invariant_hessian(const MonopoleConfig& config, const Vec3& x,
                              const InvariantFunctionJet& f) {
  const auto jet = potential_jet(config, x, 1);
  const double p = jet.value;
  const Vec3& dphi = jet.grad;
  const Vec3& df = f.grad;
  const double inv2p2 = 0.5 / (p * p);
  const double dot = dphi.dot(df);
  const Vec3 rot = dphi.cross(df);  // eps_ijk d_j phi d_k f

  Mat4 H = Mat4::Zero();
  H(0, 0) = -inv2p2 * dot;
  for (int i = 0; i < 3; ++i) {
    H(i + 1, 0) = H(0, i + 1) = -inv2p2 * rot[i];
    for (int j = 0; j < 3; ++j) {
      H(i + 1, j + 1) = f.hess(i, j) / p + (i == j ? inv2p2 * dot : 0.0) -
                        inv2p2 * (df[i] * dphi[j] + dphi[i] * df[j]);
    }
  }
  // Copy the upper triangle so the result is symmetric to the last bit.
  for (int i = 1; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) H(j, i) = H(i, j);
  return H;
}

/// Jet of r^2 = |x - origin|^2.
inline InvariantFunctionJet radius_squared_jet(const Vec3& x, const Vec3& origin = Vec3::Zero()) {
  const Vec3 d = x - origin;
  return {d.squaredNorm(), 2.0 * d, 2.0 * Mat3::Identity()};
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
template <typename Matrix>
auto symmetric_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().eval();
}

}  // namespace ghlab
