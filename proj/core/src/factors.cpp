#include "pednav/factors.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>
#include <type_traits>

namespace pednav {

const JointState& Values::at(int key) const {
  if (!contains(key)) throw std::out_of_range("Values: key " + std::to_string(key) + " not present");
  return states_[static_cast<std::size_t>(key - first_)];
}

JointState& Values::at(int key) {
  if (!contains(key)) throw std::out_of_range("Values: key " + std::to_string(key) + " not present");
  return states_[static_cast<std::size_t>(key - first_)];
}

void Values::drop_front(int count) {
  if (count < 0 || count > static_cast<int>(states_.size())) throw std::out_of_range("Values::drop_front");
  states_.erase(states_.begin(), states_.begin() + count);
  first_ += count;
}

PriorFactor PriorFactor::from_covariance(int key, const JointState& mean, const JointMatrix& cov) {
  Eigen::LLT<JointMatrix> llt(cov);
  if (llt.info() != Eigen::Success || !cov.isApprox(cov.transpose(), 1e-12)) {
    throw std::invalid_argument("PriorFactor: covariance is singular or not positive definite");
  }
  PriorFactor p;
  p.key = key;
  p.mean = mean;
  const JointMatrix L = llt.matrixL();
  p.sqrt_info = L.triangularView<Eigen::Lower>().solve(JointMatrix::Identity());
  return p;
}

PositionFactor PositionFactor::isotropic(int key, const Vec6& y, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("PositionFactor: sigma must be positive");
  PositionFactor f;
  f.key = key;
  f.y = y;
  f.sqrt_info = Mat6::Identity() / sigma;
  return f;
}

PositionResidual position_residual(const JointState& x, const Vec6& y) {
  PositionResidual out;
  out.r.head<3>() = y.head<3>() - x[Foot::kRight].p;
  out.r.tail<3>() = y.tail<3>() - x[Foot::kLeft].p;
  out.H.setZero();
  out.H.block<3, 3>(0, joint_offset(Foot::kRight) + err::kPos).setIdentity();
  out.H.block<3, 3>(3, joint_offset(Foot::kLeft) + err::kPos).setIdentity();
  return out;
}

PriorResidual prior_residual(const JointState& x0, const PriorFactor& prior) {
  PriorResidual out;
  out.r = prior.sqrt_info * (local_coordinates(prior.mean, x0) - prior.offset);
  JointMatrix D = JointMatrix::Zero();
  for (Foot f : kFeet) {
    const int o = joint_offset(f);
    D.block<err::kDim, err::kDim>(o, o) = local_coordinates_jacobian(prior.mean[f], x0[f]);
  }
  out.J = prior.sqrt_info * D;
  return out;
}

FactorKeys keys_of(const Factor& f) {
  return std::visit(
      [](const auto& x) -> FactorKeys {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PreintFactor>) {
          return {x.key_i, x.key_j};
        } else {
          return {x.key, -1};
        }
      },
      f);
}

Eigen::MatrixXd Linearization::full(const Jacobian& J) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(J.rows(), err::kJointDim);
  out.middleCols(col, J.cols()) = J;
  return out;
}

PreintFactor make_preint_factor(int key_i, int key_j, Foot foot, PreintegratedImu preint, const ImuNoiseModel& noise,
                                const GravityModel& gravity) {
  PreintFactor f;
  f.key_i = key_i;
  f.key_j = key_j;
  f.foot = foot;
  f.sqrt_info = preint_sqrt_information(preint, noise);
  f.preint = std::move(preint);
  f.noise = noise;
  f.gravity = gravity;
  return f;
}

namespace {

Linearization linearize_impl(const PriorFactor& f, const Values& values) {
  const PriorResidual pr = prior_residual(values.at(f.key), f);
  Linearization lin;
  lin.key0 = f.key;
  lin.r = pr.r;
  lin.J0 = pr.J;
  return lin;
}

const Mat15& checked_sqrt_info(const PreintFactor& f) {
  if (f.sqrt_info(0, 0) == 0.0) throw std::logic_error("PreintFactor: sqrt_info not set (use make_preint_factor)");
  return f.sqrt_info;
}

Linearization linearize_impl(const PreintFactor& f, const Values& values) {
  const NavState& xi = values.at(f.key_i)[f.foot];
  const NavState& xj = values.at(f.key_j)[f.foot];
  const PreintResidual res = residual(xi, xj, f.preint, f.gravity);
  const Mat15& W = checked_sqrt_info(f);
  const int o = joint_offset(f.foot);
  Linearization lin;
  lin.key0 = f.key_i;
  lin.key1 = f.key_j;
  lin.r = W * res.r;
  lin.col = o;
  lin.J0 = W * res.J_i;
  lin.J1 = W * res.J_j;
  return lin;
}

Linearization linearize_impl(const ZuptFactor& f, const Values& values) {
  if (!(f.sigma > 0.0)) throw std::invalid_argument("ZuptFactor: sigma must be positive");
  const ZuptResidual z = zupt_residual(values.at(f.key), f.feet);
  Linearization lin;
  lin.key0 = f.key;
  // Residual convention inside the solver is h(x) - y.
  lin.r = -z.r / f.sigma;
  lin.J0 = z.H / f.sigma;
  return lin;
}

Linearization linearize_impl(const PositionFactor& f, const Values& values) {
  const PositionResidual p = position_residual(values.at(f.key), f.y);
  Linearization lin;
  lin.key0 = f.key;
  lin.r = -f.sqrt_info * p.r;
  lin.J0 = f.sqrt_info * p.H;
  return lin;
}

Linearization linearize_impl(const DistancePenaltyFactor& f, const Values& values) {
  const PenaltyEvaluation e = penalty_factor(values.at(f.key), f.constraint);
  Linearization lin;
  lin.key0 = f.key;
  lin.r.resize(1);
  lin.r(0) = e.r;
  lin.J0 = e.J;
  return lin;
}

}  // namespace

Linearization linearize(const Factor& f, const Values& values) {
  return std::visit([&](const auto& x) { return linearize_impl(x, values); }, f);
}

double factor_cost(const Factor& f, const Values& values) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, DistancePenaltyFactor>) {
          const JointState& s = values.at(x.key);
          x.constraint.validate();
          return x.constraint.lambda *
                 softmax_penalty(delta_d(s[Foot::kRight].p, s[Foot::kLeft].p, x.constraint.d), x.constraint.alpha);
        } else if constexpr (std::is_same_v<T, PreintFactor>) {
          const PreintResidual res = residual(values.at(x.key_i)[x.foot], values.at(x.key_j)[x.foot], x.preint, x.gravity);
          return (checked_sqrt_info(x) * res.r).squaredNorm();
        } else {
          return linearize_impl(x, values).r.squaredNorm();
        }
      },
      f);
}

}  // namespace pednav
