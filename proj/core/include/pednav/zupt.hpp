#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pednav/nav_state.hpp"

namespace pednav {

/// Windowed norm-threshold stance detector settings.
struct StanceDetectorConfig {
  double acc_thresh = 0.5;   // m/s^2, on |mean ||f_b|| - g|
  double gyro_thresh = 0.3;  // rad/s, on mean ||w_b||
  int window = 5;            // samples, centered
  int min_duration = 6;      // samples
  double gravity = 9.80665;

  void validate() const;
};

/// Per-sample stance flags. A sample is stance when the centered windowed
/// means of both norms fall below threshold; runs shorter than
/// `min_duration` are discarded.
std::vector<bool> detect_stance(std::span<const ImuSample> stream, const StanceDetectorConfig& cfg);

struct FootMask {
  bool right = false;
  bool left = false;

  bool any() const { return right || left; }
  int count() const { return int(right) + int(left); }
  bool operator[](Foot f) const { return f == Foot::kRight ? right : left; }
};

/// Stance flags per keyframe.
struct StanceMask {
  std::vector<double> t;
  std::vector<FootMask> feet;

  std::size_t size() const { return t.size(); }
};

/// Residual y - H x with y = 0 and the stacked selector H against the
/// 30-dim joint error state (3x30 for one foot, 6x30 for both).
struct ZuptResidual {
  Eigen::VectorXd r;
  Eigen::Matrix<double, Eigen::Dynamic, err::kJointDim> H;
};
ZuptResidual zupt_residual(const JointState& x, FootMask mask);

/// Measurement matrix alone; rows follow the same foot order as the residual.
Eigen::Matrix<double, Eigen::Dynamic, err::kJointDim> zupt_measurement_matrix(FootMask mask);

/// Writes `t,right,left` rows.
void write_stance_csv(const std::filesystem::path& path, const StanceMask& mask);

}  // namespace pednav
