#include "pednav/preintegration.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace pednav {

void ImuNoiseModel::validate() const {
  if (!(sigma_a > 0.0) || !(sigma_g > 0.0) || !(sigma_ba > 0.0) || !(sigma_bg > 0.0)) {
    throw std::invalid_argument("ImuNoiseModel: all densities must be strictly positive");
  }
}

PreintegratedImu integrate_sample(const PreintegratedImu& acc, const ImuSample& u, double dt,
                                  const ImuNoiseModel& noise) {
  if (!u.f_b.allFinite() || !u.w_b.allFinite() || !std::isfinite(u.t)) {
    throw std::invalid_argument("integrate_sample: non-finite IMU sample");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("integrate_sample: dt must be positive");
  }

  const Vec3 a = u.f_b - acc.lin_b_a;
  const Vec3 phi = (u.w_b - acc.lin_b_g) * dt;
  const Quat E = so3::exp(phi);
  const Quat E_half = so3::exp(0.5 * phi);
  const Mat3 E_t = E.toRotationMatrix().transpose();
  const Mat3 E_half_t = E_half.toRotationMatrix().transpose();
  const Mat3 jr = so3::right_jacobian(phi);
  const Mat3 jr_half = so3::right_jacobian(0.5 * phi);
  const Mat3 M = (acc.dR * E_half).toRotationMatrix();
  const Mat3 M_ax = M * so3::skew(a);
  const double dt2 = dt * dt;

  PreintegratedImu out = acc;

  // Bias Jacobians. The mid-interval rotation carries half of this step's
  // rotation sensitivity.
  const Mat3 JR = acc.dR_dbg();
  const Mat3 JM = E_half_t * JR - 0.5 * dt * jr_half;
  out.bias_jacobian.block<3, 3>(0, 0) = E_t * JR - dt * jr;
  out.bias_jacobian.block<3, 3>(3, 0) = acc.dv_dbg() - M_ax * JM * dt;
  out.bias_jacobian.block<3, 3>(3, 3) = acc.dv_dba() - M * dt;
  out.bias_jacobian.block<3, 3>(6, 0) = acc.dp_dbg() + acc.dv_dbg() * dt - 0.5 * M_ax * JM * dt2;
  out.bias_jacobian.block<3, 3>(6, 3) = acc.dp_dba() + acc.dv_dba() * dt - 0.5 * M * dt2;

  // Covariance on (dtheta, dv, dp).
  Mat9 A = Mat9::Identity();
  A.block<3, 3>(0, 0) = E_t;
  A.block<3, 3>(3, 0) = -M_ax * E_half_t * dt;
  A.block<3, 3>(6, 0) = -0.5 * M_ax * E_half_t * dt2;
  A.block<3, 3>(6, 3) = Mat3::Identity() * dt;

  Mat96 B = Mat96::Zero();
  B.block<3, 3>(0, 0) = jr * dt;
  B.block<3, 3>(3, 0) = -M_ax * jr_half * (0.5 * dt2);
  B.block<3, 3>(6, 0) = -0.5 * M_ax * jr_half * (0.5 * dt2 * dt);
  B.block<3, 3>(3, 3) = M * dt;
  B.block<3, 3>(6, 3) = 0.5 * M * dt2;

  Eigen::Matrix<double, 6, 1> qd;
  qd.head<3>().setConstant(noise.sigma_g * noise.sigma_g / dt);
  qd.tail<3>().setConstant(noise.sigma_a * noise.sigma_a / dt);

  out.sigma = A * acc.sigma * A.transpose() + B * qd.asDiagonal() * B.transpose();
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();

  out.dp = acc.dp + acc.dv * dt + 0.5 * M * a * dt2;
  out.dv = acc.dv + M * a * dt;
  out.dR = (acc.dR * E).normalized();
  out.dt_sum = acc.dt_sum + dt;
  out.n = acc.n + 1;
  return out;
}

CorrectedIncrements correct_for_bias(const PreintegratedImu& acc, const Vec3& b_a, const Vec3& b_g) {
  const Vec3 dbg = b_g - acc.lin_b_g;
  const Vec3 dba = b_a - acc.lin_b_a;
  CorrectedIncrements c;
  c.dR = (acc.dR * so3::exp(acc.dR_dbg() * dbg)).normalized();
  c.dv = acc.dv + acc.dv_dbg() * dbg + acc.dv_dba() * dba;
  c.dp = acc.dp + acc.dp_dbg() * dbg + acc.dp_dba() * dba;
  return c;
}

NavState predict(const NavState& x_i, const PreintegratedImu& acc, const GravityModel& gravity) {
  if (acc.n == 0 || acc.dt_sum == 0.0) return x_i;
  const CorrectedIncrements c = correct_for_bias(acc, x_i.b_a, x_i.b_g);
  const Vec3 g = gravity.vector();
  const double T = acc.dt_sum;
  NavState x_j = x_i;
  x_j.q = (x_i.q * c.dR).normalized();
  x_j.v = x_i.v + g * T + x_i.q * c.dv;
  x_j.p = x_i.p + x_i.v * T + 0.5 * g * T * T + x_i.q * c.dp;
  return x_j;
}

PreintResidual residual(const NavState& x_i, const NavState& x_j, const PreintegratedImu& acc,
                        const GravityModel& gravity) {
  using namespace err;
  if (!(acc.dt_sum > 0.0)) {
    throw std::invalid_argument("preintegration residual: degenerate factor (dt_sum = 0)");
  }
  const double T = acc.dt_sum;
  const Vec3 g = gravity.vector();
  const CorrectedIncrements c = correct_for_bias(acc, x_i.b_a, x_i.b_g);
  const Vec3 dbg = x_i.b_g - acc.lin_b_g;

  const Mat3 Ri = x_i.R();
  const Mat3 Rj = x_j.R();
  const Mat3 Ri_t = Ri.transpose();

  const Vec3 r_R = so3::log(c.dR.conjugate() * x_i.q.conjugate() * x_j.q);
  const Vec3 v_rel = Ri_t * (x_j.v - x_i.v - g * T);
  const Vec3 p_rel = Ri_t * (x_j.p - x_i.p - x_i.v * T - 0.5 * g * T * T);

  PreintResidual out;
  out.r.segment<3>(0) = r_R;
  out.r.segment<3>(3) = v_rel - c.dv;
  out.r.segment<3>(6) = p_rel - c.dp;
  out.r.segment<3>(9) = x_j.b_a - x_i.b_a;
  out.r.segment<3>(12) = x_j.b_g - x_i.b_g;

  const Mat3 jr_inv = so3::right_jacobian_inverse(r_R);
  const Mat3 I3 = Mat3::Identity();
  out.J_i.setZero();
  out.J_j.setZero();

  // rotation rows
  out.J_i.block<3, 3>(0, kAtt) = -jr_inv * Rj.transpose() * Ri;
  out.J_i.block<3, 3>(0, kGyroBias) = -jr_inv * so3::exp(r_R).toRotationMatrix().transpose() *
                                      so3::right_jacobian(acc.dR_dbg() * dbg) * acc.dR_dbg();
  out.J_j.block<3, 3>(0, kAtt) = jr_inv;

  // velocity rows
  out.J_i.block<3, 3>(3, kVel) = -Ri_t;
  out.J_i.block<3, 3>(3, kAtt) = so3::skew(v_rel);
  out.J_i.block<3, 3>(3, kAccBias) = -acc.dv_dba();
  out.J_i.block<3, 3>(3, kGyroBias) = -acc.dv_dbg();
  out.J_j.block<3, 3>(3, kVel) = Ri_t;

  // position rows
  out.J_i.block<3, 3>(6, kPos) = -Ri_t;
  out.J_i.block<3, 3>(6, kVel) = -Ri_t * T;
  out.J_i.block<3, 3>(6, kAtt) = so3::skew(p_rel);
  out.J_i.block<3, 3>(6, kAccBias) = -acc.dp_dba();
  out.J_i.block<3, 3>(6, kGyroBias) = -acc.dp_dbg();
  out.J_j.block<3, 3>(6, kPos) = Ri_t;

  // bias random walk
  out.J_i.block<3, 3>(9, kAccBias) = -I3;
  out.J_j.block<3, 3>(9, kAccBias) = I3;
  out.J_i.block<3, 3>(12, kGyroBias) = -I3;
  out.J_j.block<3, 3>(12, kGyroBias) = I3;
  return out;
}

Mat15 preint_sqrt_information(const PreintegratedImu& acc, const ImuNoiseModel& noise) {
  if (!(acc.dt_sum > 0.0)) {
    throw std::invalid_argument("preint_sqrt_information: degenerate factor (dt_sum = 0)");
  }
  Mat9 sigma = acc.sigma;
  Eigen::LLT<Mat9> llt(sigma);
  double jitter = 1e-18;
  while (llt.info() != Eigen::Success) {
    sigma = acc.sigma + jitter * Mat9::Identity();
    llt.compute(sigma);
    jitter *= 10.0;
    if (jitter > 1e-6) throw std::runtime_error("preint_sqrt_information: covariance not positive definite");
  }
  Mat15 W = Mat15::Zero();
  const Mat9 L = llt.matrixL();
  W.topLeftCorner<9, 9>() = L.triangularView<Eigen::Lower>().solve(Mat9::Identity());
  const double T = acc.dt_sum;
  W.block<3, 3>(9, 9) = Mat3::Identity() / (noise.sigma_ba * std::sqrt(T));
  W.block<3, 3>(12, 12) = Mat3::Identity() / (noise.sigma_bg * std::sqrt(T));
  return W;
}

}  // namespace pednav
