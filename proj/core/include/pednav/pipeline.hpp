#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pednav/ekf.hpp"
#include "pednav/fgo.hpp"
#include "pednav/metrics.hpp"
#include "pednav/simulation.hpp"

namespace pednav {

/// Bad configuration text or an unknown method name.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Method {
  kEkfZupt,
  kEkfZuptStep,
  kEkfZuptPos,
  kEkfZuptPosStep,
  kFgoZupt,
  kFgoZuptStep,
  kFgoZuptPos,
  kFgoZuptPosStep,
};
inline constexpr std::array<Method, 8> kAllMethods{
    Method::kEkfZupt, Method::kEkfZuptStep, Method::kEkfZuptPos, Method::kEkfZuptPosStep,
    Method::kFgoZupt, Method::kFgoZuptStep, Method::kFgoZuptPos, Method::kFgoZuptPosStep};

std::string to_string(Method m);
/// Accepts the names produced by to_string, case-insensitively.
Method parse_method(const std::string& name);
bool is_fgo(Method m);
bool uses_position(Method m);
bool uses_distance(Method m);

struct SimulationConfig {
  GaitConfig gait;
  ImuNoiseModel imu_noise;
  double bias0_sigma_a = 0.01;   // m/s^2, initial accel bias spread
  double bias0_sigma_g = 5e-4;   // rad/s, initial gyro bias spread
  std::uint64_t imu_seed = 2;
  std::uint64_t bias_seed = 4;
  CorruptionConfig corruption;
  GravityModel gravity;

  /// Derives every stream's seed from one value.
  void set_seed(std::uint64_t seed);
};

/// Diagonal initial covariance around the true initial pose with zero biases.
struct PriorSigmas {
  double p = 0.01;     // m
  double v = 0.01;     // m/s
  double att = 0.01;   // rad
  double b_a = 0.01;   // m/s^2
  double b_g = 5e-4;   // rad/s
};

struct PipelineConfig {
  SimulationConfig sim;
  GraphSettings graph;  // flags are overridden per method
  SolverConfig solver;
  ProjectionConfig projection;
  PriorSigmas prior;
  bool fgo_filtered_output = false;  // report filtered rather than smoothed FGO estimates
  double violation_slack = 0.02;     // m

  /// Every key understood by from_key_values, with its current value.
  std::map<std::string, std::string> to_key_values() const;
  /// Starts from defaults and applies `kv`. Unknown keys or malformed
  /// values raise ConfigError.
  static PipelineConfig from_key_values(const std::map<std::string, std::string>& kv);
  static PipelineConfig load(const std::filesystem::path& path);
};

TrajectoryDataset simulate_dataset(const SimulationConfig& cfg);

/// Initial state (truth at epoch 0 with zero biases) and its covariance.
EkfState initial_estimate(const TrajectoryDataset& ds, const PriorSigmas& sigmas);

GraphSettings method_settings(const PipelineConfig& cfg, Method m);

struct MethodResult {
  Method method = Method::kEkfZupt;
  Trajectory trajectory;               // one state per keyframe
  std::vector<int> epochs;             // sample index of each keyframe
  std::vector<std::size_t> constraint_epochs;  // indices on the distance schedule
  std::vector<bool> projected;         // EKF only
  ErrorReport report;
  std::vector<SolverReport> solver_reports;  // FGO only
};

/// Throws EstimationError when the estimator fails.
MethodResult run_method(const TrajectoryDataset& ds, Method m, const PipelineConfig& cfg);

/// Ranked rows for at least two reports; throws otherwise.
std::vector<const ErrorReport*> compare(const std::vector<ErrorReport>& reports);

/// Writes trajectory.csv, errors.csv, summary.csv, cdf_right.csv and
/// cdf_left.csv into `dir`.
void write_method_outputs(const std::filesystem::path& dir, const MethodResult& r);
/// Reads back the report written by write_method_outputs.
ErrorReport read_method_report(const std::filesystem::path& dir);
/// summary.csv plus cdf_<method>_<foot>.csv per report.
void write_comparison(const std::filesystem::path& dir, const std::vector<ErrorReport>& reports);

}  // namespace pednav
