#include "pednav/nav_state.hpp"

#include <stdexcept>

namespace pednav {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

void require_finite(const ImuSample& u, double dt) {
  if (!std::isfinite(u.t) || !finite(u.f_b) || !finite(u.w_b)) {
    throw std::invalid_argument("mechanize: non-finite IMU sample");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("mechanize: dt must be positive and finite");
  }
}

}  // namespace

bool NavState::is_finite() const {
  return finite(p) && finite(v) && q.coeffs().allFinite() && finite(b_a) && finite(b_g);
}

Vec3 gravity(const GravityModel& model) { return model.vector(); }

NavState mechanize(const NavState& x, const ImuSample& u, double dt, const GravityModel& gravity) {
  require_finite(u, dt);
  if (!x.is_finite()) throw std::invalid_argument("mechanize: non-finite state");

  const Vec3 phi = (u.w_b - x.b_g) * dt;
  const Vec3 acc = u.f_b - x.b_a;
  const Quat q_mid = x.q * so3::exp(0.5 * phi);
  const Vec3 a_nav = q_mid * acc + gravity.vector();

  NavState out = x;
  out.q = (x.q * so3::exp(phi)).normalized();
  out.p = x.p + x.v * dt + 0.5 * a_nav * dt * dt;
  out.v = x.v + a_nav * dt;
  return out;
}

MechanizationJacobians mechanize_jacobians(const NavState& x, const ImuSample& u, double dt) {
  using namespace err;
  const Vec3 phi = (u.w_b - x.b_g) * dt;
  const Vec3 acc = u.f_b - x.b_a;
  const Mat3 exp_phi_t = so3::exp(phi).toRotationMatrix().transpose();
  const Mat3 exp_half_t = so3::exp(0.5 * phi).toRotationMatrix().transpose();
  const Mat3 jr = so3::right_jacobian(phi);
  const Mat3 jr_half = so3::right_jacobian(0.5 * phi);
  const Mat3 M = (x.q * so3::exp(0.5 * phi)).toRotationMatrix();
  const Mat3 M_acc = M * so3::skew(acc);

  // Mid-interval attitude error as a function of (dtheta, dbg, gyro noise).
  const Mat3 mid_att = exp_half_t;
  const Mat3 mid_bg = -0.5 * dt * jr_half;

  // Navigation-frame acceleration error blocks.
  const Mat3 a_att = -M_acc * mid_att;
  const Mat3 a_bg = -M_acc * mid_bg;
  const Mat3 a_ba = -M;

  MechanizationJacobians J;
  J.phi.setIdentity();
  J.phi.block<3, 3>(kPos, kVel) = dt * Mat3::Identity();
  J.phi.block<3, 3>(kPos, kAtt) = 0.5 * dt * dt * a_att;
  J.phi.block<3, 3>(kPos, kAccBias) = 0.5 * dt * dt * a_ba;
  J.phi.block<3, 3>(kPos, kGyroBias) = 0.5 * dt * dt * a_bg;
  J.phi.block<3, 3>(kVel, kAtt) = dt * a_att;
  J.phi.block<3, 3>(kVel, kAccBias) = dt * a_ba;
  J.phi.block<3, 3>(kVel, kGyroBias) = dt * a_bg;
  J.phi.block<3, 3>(kAtt, kAtt) = exp_phi_t;
  J.phi.block<3, 3>(kAtt, kGyroBias) = -dt * jr;

  // Measurement noise enters exactly like a bias error with opposite sign.
  J.g.setZero();
  J.g.block<3, 3>(kPos, 0) = -J.phi.block<3, 3>(kPos, kGyroBias);
  J.g.block<3, 3>(kVel, 0) = -J.phi.block<3, 3>(kVel, kGyroBias);
  J.g.block<3, 3>(kAtt, 0) = -J.phi.block<3, 3>(kAtt, kGyroBias);
  J.g.block<3, 3>(kPos, 3) = -J.phi.block<3, 3>(kPos, kAccBias);
  J.g.block<3, 3>(kVel, 3) = -J.phi.block<3, 3>(kVel, kAccBias);
  return J;
}

NavState retract(const NavState& x, const ErrorVector& delta) {
  using namespace err;
  NavState out;
  out.p = x.p + delta.segment<3>(kPos);
  out.v = x.v + delta.segment<3>(kVel);
  out.q = (x.q * so3::exp(delta.segment<3>(kAtt))).normalized();
  out.b_a = x.b_a + delta.segment<3>(kAccBias);
  out.b_g = x.b_g + delta.segment<3>(kGyroBias);
  return out;
}

ErrorVector local_coordinates(const NavState& x, const NavState& y) {
  using namespace err;
  ErrorVector d;
  d.segment<3>(kPos) = y.p - x.p;
  d.segment<3>(kVel) = y.v - x.v;
  d.segment<3>(kAtt) = so3::log(x.q.conjugate() * y.q);
  d.segment<3>(kAccBias) = y.b_a - x.b_a;
  d.segment<3>(kGyroBias) = y.b_g - x.b_g;
  return d;
}

JointState retract(const JointState& x, const JointErrorVector& delta) {
  JointState out;
  for (Foot f : kFeet) {
    out[f] = retract(x[f], delta.segment<err::kDim>(joint_offset(f)));
  }
  return out;
}

JointErrorVector local_coordinates(const JointState& x, const JointState& y) {
  JointErrorVector d;
  for (Foot f : kFeet) {
    d.segment<err::kDim>(joint_offset(f)) = local_coordinates(x[f], y[f]);
  }
  return d;
}

ErrorMatrix local_coordinates_jacobian(const NavState& x0, const NavState& x) {
  ErrorMatrix J = ErrorMatrix::Identity();
  J.block<3, 3>(err::kAtt, err::kAtt) =
      so3::right_jacobian_inverse(so3::log(x0.q.conjugate() * x.q));
  return J;
}

}  // namespace pednav
