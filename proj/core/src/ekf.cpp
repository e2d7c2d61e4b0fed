#include "pednav/ekf.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace pednav {

ErrorMatrix process_noise(const MechanizationJacobians& J, double dt, const ImuNoiseModel& noise) {
  Eigen::Matrix<double, 6, 1> w;
  w << Vec3::Constant(noise.sigma_g * noise.sigma_g / dt), Vec3::Constant(noise.sigma_a * noise.sigma_a / dt);
  ErrorMatrix Q = J.g * w.asDiagonal() * J.g.transpose();
  Q.block<3, 3>(err::kAccBias, err::kAccBias).diagonal().array() += noise.sigma_ba * noise.sigma_ba * dt;
  Q.block<3, 3>(err::kGyroBias, err::kGyroBias).diagonal().array() += noise.sigma_bg * noise.sigma_bg * dt;
  return Q;
}

EkfState ekf_predict(const EkfState& s, const ImuSample& u_right, const ImuSample& u_left, double dt,
                     const ImuNoiseModel& noise, const GravityModel& gravity) {
  constexpr int D = err::kDim;
  EkfState out;
  std::array<ErrorMatrix, 2> phi;
  for (Foot f : kFeet) {
    const ImuSample& u = f == Foot::kRight ? u_right : u_left;
    const MechanizationJacobians J = mechanize_jacobians(s.x[f], u, dt);
    out.x[f] = mechanize(s.x[f], u, dt, gravity);
    phi[index(f)] = J.phi;
    const int o = joint_offset(f);
    out.P.block<D, D>(o, o) = J.phi * s.P.block<D, D>(o, o) * J.phi.transpose() + process_noise(J, dt, noise);
  }
  out.P.block<D, D>(0, D) = phi[0] * s.P.block<D, D>(0, D) * phi[1].transpose();
  out.P.block<D, D>(D, 0) = out.P.block<D, D>(0, D).transpose();
  if (!out.x.is_finite() || !out.P.allFinite()) throw EstimationError("ekf_predict: non-finite state");
  return out;
}

EkfState ekf_update(const EkfState& s, const Eigen::VectorXd& innovation,
                    const Eigen::Matrix<double, Eigen::Dynamic, err::kJointDim>& H, const Eigen::MatrixXd& R) {
  const Eigen::Matrix<double, err::kJointDim, Eigen::Dynamic> PHt = s.P * H.transpose();
  const Eigen::MatrixXd S = H * PHt + R;
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    throw EstimationError("ekf_update: innovation covariance is singular");
  }
  const Eigen::Matrix<double, err::kJointDim, Eigen::Dynamic> K = llt.solve(PHt.transpose()).transpose();
  const JointErrorVector dx = K * innovation;

  EkfState out;
  out.x = retract(s.x, dx);
  const JointMatrix IKH = JointMatrix::Identity() - K * H;
  out.P = IKH * s.P * IKH.transpose() + K * R * K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return out;
}

EkfState ekf_update_zupt(const EkfState& s, FootMask feet, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("ekf_update_zupt: sigma must be positive");
  const ZuptResidual z = zupt_residual(s.x, feet);
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(z.r.size(), z.r.size()) * sigma * sigma;
  return ekf_update(s, z.r, z.H, R);
}

EkfState ekf_update_position(const EkfState& s, const Vec6& y, const Mat6& R) {
  Eigen::VectorXd innovation(6);
  innovation << y.head<3>() - s.x[Foot::kRight].p, y.tail<3>() - s.x[Foot::kLeft].p;
  Eigen::Matrix<double, Eigen::Dynamic, err::kJointDim> H(6, err::kJointDim);
  H.setZero();
  H.block<3, 3>(0, joint_offset(Foot::kRight) + err::kPos).setIdentity();
  H.block<3, 3>(3, joint_offset(Foot::kLeft) + err::kPos).setIdentity();
  return ekf_update(s, innovation, H, R);
}

namespace {

// Exact minimizer of (s - s0)^T M^-1 (s - s0) over ||s|| = d, with M the
// covariance of p1 - p2. Stationarity gives s = (I + nu M)^-1 s0 for the
// multiplier nu > 0 at which ||s|| = d; ||s(nu)|| is decreasing, so a
// safeguarded Newton iteration on 1/||s|| - 1/d converges from nu = 0.
Vec3 secular_separation(const Vec3& s0, const Eigen::Matrix3d& M, double d) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
  const Vec3 lam = es.eigenvalues();
  const Vec3 c = es.eigenvectors().transpose() * s0;
  auto norm_at = [&](double nu, double* deriv) {
    double n2 = 0.0, dn2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double den = 1.0 + nu * lam(i);
      n2 += c(i) * c(i) / (den * den);
      dn2 += -2.0 * lam(i) * c(i) * c(i) / (den * den * den);
    }
    const double n = std::sqrt(n2);
    if (deriv) *deriv = dn2 / (2.0 * n);
    return n;
  };
  double lo = 0.0, hi = 1.0;
  while (norm_at(hi, nullptr) > d) {
    hi *= 2.0;
    if (hi > 1e300) throw EstimationError("project_distance: constraint multiplier diverged");
  }
  double nu = 0.0;
  for (int it = 0; it < 200; ++it) {
    double dn = 0.0;
    const double n = norm_at(nu, &dn);
    (n > d ? lo : hi) = nu;
    const double phi = 1.0 / n - 1.0 / d;
    const double dphi = -dn / (n * n);
    double next = dphi > 0.0 ? nu - phi / dphi : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - nu) <= 1e-15 * std::max(1.0, nu) || hi - lo <= 1e-15 * std::max(1.0, hi)) {
      nu = next;
      break;
    }
    nu = next;
  }
  Vec3 s = Vec3::Zero();
  for (int i = 0; i < 3; ++i) s(i) = c(i) / (1.0 + nu * lam(i));
  return es.eigenvectors() * s;
}

}  // namespace

EkfState project_distance(const EkfState& s, const DistanceConstraint& c, const ProjectionConfig& cfg) {
  c.validate();
  const Vec3 dp0 = s.x[Foot::kRight].p - s.x[Foot::kLeft].p;
  if (dp0.norm() <= c.d) return s;

  constexpr int o1 = joint_offset(Foot::kRight) + err::kPos;
  constexpr int o2 = joint_offset(Foot::kLeft) + err::kPos;
  // Positions are additive in the error state, so the constraint on the
  // correction delta is ||dp0 + delta_p1 - delta_p2|| = d.
  JointErrorVector delta = JointErrorVector::Zero();
  bool converged = false;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Vec3 sep = dp0 + delta.segment<3>(o1) - delta.segment<3>(o2);
    const double n = std::max(sep.norm(), c.eps_norm);
    const Vec3 u = sep / n;
    Eigen::Matrix<double, 1, err::kJointDim> D = Eigen::Matrix<double, 1, err::kJointDim>::Zero();
    D.segment<3>(o1) = u.transpose();
    D.segment<3>(o2) = -u.transpose();
    const JointErrorVector PDt = s.P * D.transpose();
    const double DPDt = D.dot(PDt);
    if (!(DPDt > 0.0) || !std::isfinite(DPDt)) {
      throw EstimationError("project_distance: degenerate covariance along the constraint");
    }
    const double g = n - c.d;
    const JointErrorVector next = -PDt * ((g - D.dot(delta)) / DPDt);
    const double change = (next - delta).norm();
    delta = next;
    const Vec3 sep_next = dp0 + delta.segment<3>(o1) - delta.segment<3>(o2);
    if (std::abs(sep_next.norm() - c.d) < cfg.tolerance && change < cfg.tolerance) {
      converged = true;
      break;
    }
  }

  if (!converged) {
    // Relinearization can stall when p1 - p2 is strongly correlated across
    // directions; fall back to the exact multiplier equation.
    Eigen::Matrix<double, 3, err::kJointDim> A = Eigen::Matrix<double, 3, err::kJointDim>::Zero();
    A.block<3, 3>(0, o1).setIdentity();
    A.block<3, 3>(0, o2) = -Eigen::Matrix3d::Identity();
    const Eigen::Matrix<double, err::kJointDim, 3> PAt = s.P * A.transpose();
    const Eigen::Matrix3d M = A * PAt;
    const Eigen::LLT<Eigen::Matrix3d> llt(M);
    if (llt.info() != Eigen::Success) {
      throw EstimationError("project_distance: degenerate covariance along the constraint");
    }
    delta = PAt * llt.solve(secular_separation(dp0, M, c.d) - dp0);
  }

  EkfState out = s;
  out.x = retract(s.x, delta);
  return out;
}

std::vector<JointState> dead_reckon(const TrajectoryDataset& ds, const JointState& x0, const GravityModel& gravity) {
  std::vector<JointState> out;
  out.reserve(ds.samples());
  out.push_back(x0);
  const double dt = ds.dt();
  for (std::size_t k = 0; k + 1 < ds.samples(); ++k) {
    JointState next;
    for (Foot f : kFeet) next[f] = mechanize(out.back()[f], ds.imu_of(f)[k], dt, gravity);
    out.push_back(next);
  }
  return out;
}

EkfResult run_ekf(const TrajectoryDataset& ds, const GraphSettings& settings, const EkfState& initial,
                  const ProjectionConfig& projection) {
  EkfResult out;
  out.schedule = make_schedule(ds, settings, stance_flags(ds, settings));
  out.estimates.reserve(out.schedule.size());
  out.projected.reserve(out.schedule.size());
  const Mat6 R_pos = Mat6::Identity() * settings.pos_sigma * settings.pos_sigma;
  const double dt = ds.dt();

  EkfState s = initial;
  std::size_t k = 0;
  const std::size_t K = out.schedule.size();
  for (std::size_t e = 0; e < ds.samples() && k < K; ++e) {
    if (e > 0) s = ekf_predict(s, ds.imu[0][e - 1], ds.imu[1][e - 1], dt, settings.noise, settings.gravity);
    if (static_cast<int>(e) != out.schedule.epochs[k]) continue;

    if (settings.use_zupt && out.schedule.zupt.feet[k].any()) {
      s = ekf_update_zupt(s, out.schedule.zupt.feet[k], settings.zupt_sigma);
    }
    if (settings.use_position && out.schedule.fix[k] >= 0) {
      const PositionFix& fx = ds.fixes[static_cast<std::size_t>(out.schedule.fix[k])];
      Vec6 y;
      y << fx.y[0], fx.y[1];
      s = ekf_update_position(s, y, R_pos);
    }
    bool active = false;
    if (settings.use_distance && out.schedule.penalty[k]) {
      active = (s.x[Foot::kRight].p - s.x[Foot::kLeft].p).norm() > settings.constraint.d;
      s = project_distance(s, settings.constraint, projection);
    }
    if (!s.x.is_finite()) throw EstimationError("ekf: non-finite state estimate");
    out.estimates.push_back(s.x);
    out.projected.push_back(active);
    ++k;
  }
  out.final_covariance = s.P;
  return out;
}

}  // namespace pednav
