// Basic types shared by every ghlab module.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ghlab {

/// A point of the base R^3, in the hyperkaehler moment-map coordinates (mu1, mu2, mu3).
using Vec3 = Eigen::Vector3d;
/// A point of a plane, expressed in that plane's (u, w) frame.
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class ErrorKind {
  InvalidInput,
  EvaluationAtCenter,
  NonpositivePhi,
  NoCriticalPoints,
  NotCritical,
  DegenerateCritical,
  DegeneratePresent,
  RootNotBracketed,
  StepUnderflow,
  NotRestPoint,
  PastExtinction,
  SelfIntersection,
  CenterCollision,
  DegenerateStencil,
  CoincidentPoints,
  CoincidentEndpoints,
  RayDegeneracy,
  NotAlmostCalibrated,
  NotPerfectMorse,
  ChordThroughCenter,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EvaluationAtCenter: return "EvaluationAtCenter";
    case ErrorKind::NonpositivePhi: return "NonpositivePhi";
    case ErrorKind::NoCriticalPoints: return "NoCriticalPoints";
    case ErrorKind::NotCritical: return "NotCritical";
    case ErrorKind::DegenerateCritical: return "DegenerateCritical";
    case ErrorKind::DegeneratePresent: return "DegeneratePresent";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NotRestPoint: return "NotRestPoint";
    case ErrorKind::PastExtinction: return "PastExtinction";
    case ErrorKind::SelfIntersection: return "SelfIntersection";
    case ErrorKind::CenterCollision: return "CenterCollision";
    case ErrorKind::DegenerateStencil: return "DegenerateStencil";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::CoincidentEndpoints: return "CoincidentEndpoints";
    case ErrorKind::RayDegeneracy: return "RayDegeneracy";
    case ErrorKind::NotAlmostCalibrated: return "NotAlmostCalibrated";
    case ErrorKind::NotPerfectMorse: return "NotPerfectMorse";
    case ErrorKind::ChordThroughCenter: return "ChordThroughCenter";
  }
  return "Unknown";
}

/// The single exception type thrown by the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, two_pi);
  if (a <= -pi) a += two_pi;
  return a;
}

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double angle_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }

/// An affine plane in R^3 with an orthonormal in-plane frame (u, w).
struct Plane {
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 w = Vec3::UnitY();

  /// Orthonormalizes (u, w) by Gram-Schmidt; throws InvalidInput if they are dependent.
  static Plane make(const Vec3& origin, const Vec3& u, const Vec3& w) {
    require(origin.allFinite() && u.allFinite() && w.allFinite(), ErrorKind::InvalidInput,
            "plane data must be finite");
    const double un = u.norm();
    require(un > 0.0, ErrorKind::InvalidInput, "plane axis u must be nonzero");
    const Vec3 e1 = u / un;
    const Vec3 w_perp = w - w.dot(e1) * e1;
    require(w_perp.norm() > 1e-12 * std::max(1.0, w.norm()), ErrorKind::InvalidInput,
            "plane axes must be linearly independent");
    return Plane{origin, e1, w_perp.normalized()};
  }

  Vec3 normal() const { return u.cross(w); }
  Vec3 to3d(const Vec2& p) const { return origin + p.x() * u + p.y() * w; }
  Vec2 project(const Vec3& x) const {
    const Vec3 d = x - origin;
    return {d.dot(u), d.dot(w)};
  }
  double distance(const Vec3& x) const { return std::abs((x - origin).dot(normal())); }
};

}  // namespace ghlab
