#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace pednav::so3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

/// Quaternion exponential of a rotation vector.
inline Quat exp(const Vec3& phi) {
  const double theta = phi.norm();
  const double half = 0.5 * theta;
  double k;  // sin(theta/2) / theta
  if (theta < 1e-5) {
    const double t2 = theta * theta;
    k = 0.5 - t2 / 48.0 + t2 * t2 / 3840.0;
  } else {
    k = std::sin(half) / theta;
  }
  Quat q(std::cos(half), k * phi.x(), k * phi.y(), k * phi.z());
  return q;
}

/// Rotation vector of a unit quaternion, angle in [0, pi].
inline Vec3 log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < 1e-8) {
    // 2 atan(s/w)/s ~ (2/w)(1 - s^2/(3 w^2))
    const double w = q.w();
    return (2.0 / w) * (1.0 - s * s / (3.0 * w * w)) * v;
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return (angle / s) * v;
}

/// Right Jacobian of SO(3).
inline Mat3 right_jacobian(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 W = skew(phi);
  if (theta < 1e-5) {
    return Mat3::Identity() - 0.5 * W + (1.0 / 6.0) * W * W;
  }
  const double t2 = theta * theta;
  return Mat3::Identity() - (1.0 - std::cos(theta)) / t2 * W +
         (theta - std::sin(theta)) / (t2 * theta) * W * W;
}

inline Mat3 right_jacobian_inverse(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 W = skew(phi);
  if (theta < 1e-5) {
    return Mat3::Identity() + 0.5 * W + (1.0 / 12.0) * W * W;
  }
  const double t2 = theta * theta;
  const double c = 1.0 / t2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * W + c * W * W;
}

}  // namespace pednav::so3
