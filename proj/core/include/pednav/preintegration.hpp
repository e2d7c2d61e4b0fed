#pragma once

#include <Eigen/Core>

#include "pednav/nav_state.hpp"

namespace pednav {

/// Continuous-time IMU noise densities.
struct ImuNoiseModel {
  double sigma_a = 0.02;    // m/s^2/sqrt(Hz)
  double sigma_g = 0.002;   // rad/s/sqrt(Hz)
  double sigma_ba = 1e-4;   // m/s^3/sqrt(Hz)
  double sigma_bg = 1e-4;   // rad/s^2/sqrt(Hz)

  void validate() const;
};

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat96 = Eigen::Matrix<double, 9, 6>;

/// Relative motion accumulated between two keyframes, expressed in the body
/// frame of the first keyframe with gravity removed. Blocks of `sigma` and
/// the rows of `bias_jacobian` are ordered (dtheta, dv, dp); the columns of
/// `bias_jacobian` are ordered (b_g, b_a).
struct PreintegratedImu {
  Quat dR = Quat::Identity();
  Vec3 dv = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
  Mat9 sigma = Mat9::Zero();
  Mat96 bias_jacobian = Mat96::Zero();
  Vec3 lin_b_a = Vec3::Zero();
  Vec3 lin_b_g = Vec3::Zero();
  double dt_sum = 0.0;
  int n = 0;

  PreintegratedImu() = default;
  PreintegratedImu(const Vec3& b_a, const Vec3& b_g) : lin_b_a(b_a), lin_b_g(b_g) {}

  Mat3 dR_dbg() const { return bias_jacobian.block<3, 3>(0, 0); }
  Mat3 dv_dbg() const { return bias_jacobian.block<3, 3>(3, 0); }
  Mat3 dv_dba() const { return bias_jacobian.block<3, 3>(3, 3); }
  Mat3 dp_dbg() const { return bias_jacobian.block<3, 3>(6, 0); }
  Mat3 dp_dba() const { return bias_jacobian.block<3, 3>(6, 3); }
};

PreintegratedImu integrate_sample(const PreintegratedImu& acc, const ImuSample& u, double dt,
                                  const ImuNoiseModel& noise);

/// Bias-corrected increments for new bias estimates, first order in the
/// difference from the linearization point.
struct CorrectedIncrements {
  Quat dR;
  Vec3 dv;
  Vec3 dp;
};
CorrectedIncrements correct_for_bias(const PreintegratedImu& acc, const Vec3& b_a, const Vec3& b_g);

/// Composes x_i with the increments (at x_i's biases) and reinstates
/// gravity. An empty accumulator returns x_i.
NavState predict(const NavState& x_i, const PreintegratedImu& acc, const GravityModel& gravity = {});

using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;

/// Unwhitened preintegration residual, rows ordered (rotation, velocity,
/// position, accel-bias walk, gyro-bias walk), with Jacobians against the
/// 15-dim error states of both endpoints.
struct PreintResidual {
  Vec15 r;
  Mat15 J_i;
  Mat15 J_j;
};
PreintResidual residual(const NavState& x_i, const NavState& x_j, const PreintegratedImu& acc,
                        const GravityModel& gravity = {});

/// Upper-triangular square-root information of the 15-dim residual: the
/// preintegrated covariance on the motion rows and the bias random walk over
/// dt_sum on the bias rows.
Mat15 preint_sqrt_information(const PreintegratedImu& acc, const ImuNoiseModel& noise);

}  // namespace pednav
