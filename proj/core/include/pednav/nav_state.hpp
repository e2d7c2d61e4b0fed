#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "pednav/so3.hpp"

namespace pednav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Per-IMU error-state layout. Every measurement matrix in the library
/// indexes against this order: (dp, dv, dtheta, dba, dbg).
namespace err {
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kAtt = 6;
inline constexpr int kAccBias = 9;
inline constexpr int kGyroBias = 12;
inline constexpr int kDim = 15;
/// Joint error state: [IMU1 (right foot) | IMU2 (left foot)].
inline constexpr int kJointDim = 2 * kDim;
}  // namespace err

using ErrorVector = Eigen::Matrix<double, err::kDim, 1>;
using JointErrorVector = Eigen::Matrix<double, err::kJointDim, 1>;
using ErrorMatrix = Eigen::Matrix<double, err::kDim, err::kDim>;
using JointMatrix = Eigen::Matrix<double, err::kJointDim, err::kJointDim>;

enum class Foot : int { kRight = 0, kLeft = 1 };
inline constexpr std::array<Foot, 2> kFeet{Foot::kRight, Foot::kLeft};
inline constexpr int index(Foot f) { return static_cast<int>(f); }
inline constexpr int joint_offset(Foot f) { return index(f) * err::kDim; }

struct ImuSample {
  double t = 0.0;
  Vec3 f_b = Vec3::Zero();  // specific force, m/s^2
  Vec3 w_b = Vec3::Zero();  // angular rate, rad/s
};

/// Navigation state of one IMU in the local-level ENU frame.
struct NavState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Quat q = Quat::Identity();  // body -> navigation
  Vec3 b_a = Vec3::Zero();
  Vec3 b_g = Vec3::Zero();

  Mat3 R() const { return q.toRotationMatrix(); }
  bool is_finite() const;
};

struct JointState {
  std::array<NavState, 2> feet;

  NavState& operator[](Foot f) { return feet[index(f)]; }
  const NavState& operator[](Foot f) const { return feet[index(f)]; }
  bool is_finite() const { return feet[0].is_finite() && feet[1].is_finite(); }
};

/// Constant navigation-frame gravity. One instance is shared by the
/// simulator and the estimators.
struct GravityModel {
  double magnitude = 9.80665;
  Vec3 vector() const { return Vec3(0.0, 0.0, -magnitude); }
};

Vec3 gravity(const GravityModel& model = {});

/// Strapdown update over one sample interval. Attitude advances by the bias
/// compensated rate; velocity and position use the specific force rotated
/// through the mid-interval attitude.
NavState mechanize(const NavState& x, const ImuSample& u, double dt,
                   const GravityModel& gravity = {});

/// Exact Jacobians of `mechanize` with respect to the 15-dim error state
/// (phi) and the per-sample gyro/accel measurement noise (g, ordered
/// [w_b, f_b]).
struct MechanizationJacobians {
  ErrorMatrix phi;
  Eigen::Matrix<double, err::kDim, 6> g;
};
MechanizationJacobians mechanize_jacobians(const NavState& x, const ImuSample& u, double dt);

NavState retract(const NavState& x, const ErrorVector& delta);
ErrorVector local_coordinates(const NavState& x, const NavState& y);

JointState retract(const JointState& x, const JointErrorVector& delta);
JointErrorVector local_coordinates(const JointState& x, const JointState& y);

/// d local_coordinates(x0, x) / d delta at x, where x is perturbed by retract.
ErrorMatrix local_coordinates_jacobian(const NavState& x0, const NavState& x);

}  // namespace pednav
