#pragma once

#include <Eigen/Core>

#include "pednav/nav_state.hpp"

namespace pednav {

/// Upper bound on the distance between the two foot-mounted IMUs, with the
/// softplus ("softmax") penalty parameters used to encode it as a cost.
struct DistanceConstraint {
  double d = 0.8;         // m
  double alpha = 50.0;    // sharpness, 1/m
  double lambda = 100.0;  // penalty weight
  double eps_norm = 1e-9; // m

  void validate() const;
};

/// ||p1 - p2|| - d. Positive when the constraint is violated.
double delta_d(const Vec3& p1, const Vec3& p2, double d);

/// (1/alpha) log(1 + exp(alpha delta)), evaluated as
/// max(delta, 0) + (1/alpha) log1p(exp(-alpha |delta|)).
double softmax_penalty(double delta, double alpha);

/// d softmax_penalty / d delta, the logistic function of alpha delta.
double softmax_penalty_derivative(double delta, double alpha);

/// Square-root residual offset that keeps r = sqrt(cost + eps) differentiable
/// when the penalty vanishes.
inline constexpr double kPenaltyEpsCost = 1e-12;

struct PenaltyEvaluation {
  double cost = 0.0;                  // lambda * softmax(delta_d)
  JointErrorVector gradient;          // d cost / d joint error state
  double r = 0.0;                     // sqrt(cost + eps)
  Eigen::Matrix<double, 1, err::kJointDim> J;  // d r / d joint error state
  JointMatrix gauss_newton;           // 2 J^T J, positive semi-definite
};

PenaltyEvaluation penalty_factor(const JointState& x, const DistanceConstraint& c);

}  // namespace pednav
