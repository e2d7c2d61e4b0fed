#pragma once

#include <vector>

#include "pednav/constraints.hpp"
#include "pednav/dataset.hpp"
#include "pednav/errors.hpp"
#include "pednav/factor_graph.hpp"
#include "pednav/preintegration.hpp"
#include "pednav/zupt.hpp"

namespace pednav {

/// Centralized error-state filter over both feet. P is the covariance of
/// the 30-dim joint error state around x.
struct EkfState {
  JointState x;
  JointMatrix P = JointMatrix::Identity();
};

/// Per-IMU process noise over one sample: white measurement noise mapped
/// through the mechanization plus bias random walk.
ErrorMatrix process_noise(const MechanizationJacobians& J, double dt, const ImuNoiseModel& noise);

EkfState ekf_predict(const EkfState& s, const ImuSample& u_right, const ImuSample& u_left, double dt,
                     const ImuNoiseModel& noise, const GravityModel& gravity = {});

/// Generic update with whitening-free residual y - h(x) = r and Jacobian H of
/// h. Joseph-form covariance, then explicit symmetrization.
EkfState ekf_update(const EkfState& s, const Eigen::VectorXd& innovation,
                    const Eigen::Matrix<double, Eigen::Dynamic, err::kJointDim>& H, const Eigen::MatrixXd& R);

EkfState ekf_update_zupt(const EkfState& s, FootMask feet, double sigma);
EkfState ekf_update_position(const EkfState& s, const Vec6& y, const Mat6& R);

struct ProjectionConfig {
  int max_iterations = 10;
  double tolerance = 1e-9;  // m, on |delta_d| and on the change between iterates
};

/// Projects an estimate violating ||p1 - p2|| <= d onto the constraint
/// surface, minimizing the P^-1 weighted distance from the input estimate.
/// Each iteration relinearizes the constraint at the current iterate while
/// keeping the input estimate as the anchor. P is left unchanged.
EkfState project_distance(const EkfState& s, const DistanceConstraint& c, const ProjectionConfig& cfg = {});

struct EkfResult {
  KeyframeSchedule schedule;
  std::vector<JointState> estimates;  // at each keyframe, after its updates
  std::vector<bool> projected;        // projection was active at the keyframe
  JointMatrix final_covariance;
};

/// Filters the full dataset: per-sample propagation, ZUPT at stance
/// keyframes, position updates at fixes and distance projection on the
/// penalty schedule, applied last.
EkfResult run_ekf(const TrajectoryDataset& ds, const GraphSettings& settings, const EkfState& initial,
                  const ProjectionConfig& projection = {});

/// Pure strapdown integration of both feet, one state per epoch.
std::vector<JointState> dead_reckon(const TrajectoryDataset& ds, const JointState& x0,
                                    const GravityModel& gravity = {});

}  // namespace pednav
