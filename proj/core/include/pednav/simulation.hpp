#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pednav/dataset.hpp"
#include "pednav/preintegration.hpp"

namespace pednav {

/// Synthetic walk: alternating footfalls placed along a closed waypoint
/// path, each foot offset laterally by half the step width.
struct GaitConfig {
  double step_length = 0.7;   // m, distance between consecutive footfalls
  double cadence = 1.8;       // steps/s
  double step_width = 0.2;    // m, lateral foot separation
  double stance_ratio = 0.6;  // fraction of a foot's cycle spent in stance
  double duration = 120.0;    // s
  double imu_rate = 60.0;     // Hz
  double foot_lift = 0.05;    // m, peak swing height
  double swing_pitch = 0.4;   // rad, peak foot pitch during swing
  /// Closed path; the last waypoint connects back to the first.
  std::vector<Eigen::Vector2d> path = default_path();
  /// Selects the starting arc position along the path.
  std::uint64_t seed = 1;

  void validate() const;
  double cycle_period() const { return 2.0 / cadence; }
  /// Figure-eight of two 1.5 m circles spanning 6 m x 3 m.
  static std::vector<Eigen::Vector2d> default_path();
};

struct StancePhase {
  double start = 0.0;  // scheduled start, may precede t = 0
  double end = 0.0;
};

/// Ground truth sampled at imu_rate: samples() + 1 epochs so that the IMU
/// stream of samples() entries drives every interval.
struct GroundTruth {
  double imu_rate = 60.0;
  std::array<std::vector<TruthSample>, 2> feet;
  std::vector<FootMask> stance;  // exact labels per epoch
  std::array<std::vector<StancePhase>, 2> phases;
  double max_separation = 0.0;   // max ||p1 - p2|| over all epochs

  std::size_t epochs() const { return feet[0].size(); }
};

/// Positions are the trapezoidal integral of the analytic velocity profile,
/// which makes the truth exactly reproducible by the strapdown scheme.
GroundTruth generate_gait(const GaitConfig& cfg);

struct ImuBias {
  Vec3 b_a = Vec3::Zero();
  Vec3 b_g = Vec3::Zero();
};

/// Sensor error model used by the simulator. Zero densities are allowed and
/// disable the corresponding error source.
struct ImuErrorConfig {
  ImuNoiseModel noise;
  std::array<ImuBias, 2> bias0{};
  std::uint64_t seed = 2;
};

/// Exact discrete inverse of `mechanize` followed by bias random walk and
/// white noise. Returns one stream per foot with epochs() - 1 samples.
std::array<std::vector<ImuSample>, 2> synthesize_imu(const GroundTruth& truth, const ImuErrorConfig& cfg,
                                                     const GravityModel& gravity = {});

struct CorruptionConfig {
  double pos_sigma = 0.30;     // m, per axis
  double pos_interval = 0.5;   // s
  double outlier_prob = 0.05;  // per fix
  std::vector<double> outlier_set{1.0, 2.0, 3.0};  // m
  std::uint64_t seed = 3;

  void validate() const;
};

/// Fixes every pos_interval seconds (starting at t = 0) over the first
/// `samples` epochs of the truth.
std::vector<PositionFix> corrupt_positions(const GroundTruth& truth, std::size_t samples,
                                           const CorruptionConfig& cfg);

/// Draws the initial sensor biases for both feet.
std::array<ImuBias, 2> draw_initial_biases(double sigma_ba, double sigma_bg, std::uint64_t seed);

}  // namespace pednav
