#pragma once

#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pednav/constraints.hpp"
#include "pednav/nav_state.hpp"
#include "pednav/preintegration.hpp"
#include "pednav/zupt.hpp"

namespace pednav {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Joint states of the graph nodes, keyed by contiguous keyframe index.
class Values {
 public:
  Values() = default;
  Values(int first_key, std::vector<JointState> states) : first_(first_key), states_(std::move(states)) {}

  int first_key() const { return first_; }
  int last_key() const { return first_ + static_cast<int>(states_.size()) - 1; }
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  bool contains(int key) const { return key >= first_ && key <= last_key(); }

  const JointState& at(int key) const;
  JointState& at(int key);

  void push_back(const JointState& x) { states_.push_back(x); }
  /// Removes the `count` oldest nodes.
  void drop_front(int count);

  const std::vector<JointState>& states() const { return states_; }

 private:
  int first_ = 0;
  std::vector<JointState> states_;
};

/// Gaussian prior on a node, r = W (local(mean, x) - offset). A nonzero
/// offset represents a linearized marginal whose mode sits away from its
/// linearization point.
struct PriorFactor {
  int key = 0;
  JointState mean;
  JointMatrix sqrt_info = JointMatrix::Identity();
  JointErrorVector offset = JointErrorVector::Zero();

  /// Throws if the covariance is not positive definite.
  static PriorFactor from_covariance(int key, const JointState& mean, const JointMatrix& cov);
};

/// IMU motion between consecutive nodes for one foot.
struct PreintFactor {
  int key_i = 0;
  int key_j = 1;
  Foot foot = Foot::kRight;
  PreintegratedImu preint;
  ImuNoiseModel noise;
  GravityModel gravity;
  /// preint_sqrt_information(preint, noise); filled by make_preint_factor.
  Mat15 sqrt_info = Mat15::Zero();
};

PreintFactor make_preint_factor(int key_i, int key_j, Foot foot, PreintegratedImu preint, const ImuNoiseModel& noise,
                                const GravityModel& gravity);

/// Zero-velocity pseudo-measurement, R = sigma^2 I per flagged foot.
struct ZuptFactor {
  int key = 0;
  FootMask feet;
  double sigma = 0.01;
};

/// Loosely coupled position of both feet, y = (p1; p2).
struct PositionFactor {
  int key = 0;
  Vec6 y = Vec6::Zero();
  Mat6 sqrt_info = Mat6::Identity();

  static PositionFactor isotropic(int key, const Vec6& y, double sigma);
};

/// lambda * softmax(||p1 - p2|| - d) at one node.
struct DistancePenaltyFactor {
  int key = 0;
  DistanceConstraint constraint;
};

using Factor = std::variant<PriorFactor, PreintFactor, ZuptFactor, PositionFactor, DistancePenaltyFactor>;

/// Whitened residual and Jacobians with respect to the joint error state of
/// each referenced node (at most two, always adjacent keys).
struct Linearization {
  using Residual = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, err::kJointDim, 1>;
  using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, err::kJointDim, err::kJointDim>;
  int key0 = 0;
  int key1 = -1;  // -1 for unary factors
  /// J0 and J1 hold joint-error columns [col, col + J0.cols()); the rest are zero.
  int col = 0;
  Residual r;
  Jacobian J0;
  Jacobian J1;

  /// Jacobian with all 30 joint-error columns.
  Eigen::MatrixXd full(const Jacobian& J) const;
};

struct FactorKeys {
  int first = 0;
  int second = -1;
};

FactorKeys keys_of(const Factor& f);
Linearization linearize(const Factor& f, const Values& values);
/// Contribution to the objective: ||r||^2 for Gaussian factors, the exact
/// lambda * softmax for penalty factors.
double factor_cost(const Factor& f, const Values& values);

/// Residual y - H x for both feet's positions (H selects columns 1-3 and
/// 16-18 of the joint error state).
struct PositionResidual {
  Vec6 r;
  Eigen::Matrix<double, 6, err::kJointDim> H;
};
PositionResidual position_residual(const JointState& x, const Vec6& y);

/// Whitened prior residual and its Jacobian.
struct PriorResidual {
  JointErrorVector r;
  JointMatrix J;
};
PriorResidual prior_residual(const JointState& x0, const PriorFactor& prior);

}  // namespace pednav
