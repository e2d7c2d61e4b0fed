#include "pednav/constraints.hpp"

#include <cmath>
#include <stdexcept>

namespace pednav {

void DistanceConstraint::validate() const {
  if (!(d > 0.0) || !(alpha > 0.0) || !(lambda >= 0.0) || !(eps_norm > 0.0)) {
    throw std::invalid_argument("DistanceConstraint: requires d > 0, alpha > 0, lambda >= 0, eps_norm > 0");
  }
}

double delta_d(const Vec3& p1, const Vec3& p2, double d) { return (p1 - p2).norm() - d; }

double softmax_penalty(double delta, double alpha) {
  return std::max(delta, 0.0) + std::log1p(std::exp(-alpha * std::abs(delta))) / alpha;
}

double softmax_penalty_derivative(double delta, double alpha) {
  const double z = alpha * delta;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

PenaltyEvaluation penalty_factor(const JointState& x, const DistanceConstraint& c) {
  c.validate();
  const Vec3 diff = x[Foot::kRight].p - x[Foot::kLeft].p;
  const double dist = diff.norm();
  const double delta = dist - c.d;
  const Vec3 u = diff / std::max(dist, c.eps_norm);

  PenaltyEvaluation out;
  out.cost = c.lambda * softmax_penalty(delta, c.alpha);
  const double dcost = c.lambda * softmax_penalty_derivative(delta, c.alpha);

  out.gradient.setZero();
  out.gradient.segment<3>(joint_offset(Foot::kRight) + err::kPos) = dcost * u;
  out.gradient.segment<3>(joint_offset(Foot::kLeft) + err::kPos) = -dcost * u;

  out.r = std::sqrt(out.cost + kPenaltyEpsCost);
  out.J = out.gradient.transpose() / (2.0 * out.r);
  out.gauss_newton = 2.0 * out.J.transpose() * out.J;
  return out;
}

}  // namespace pednav
