#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pednav/nav_state.hpp"
#include "pednav/zupt.hpp"

namespace pednav {

struct TruthSample {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Quat q = Quat::Identity();
};

/// Corrupted position solution for both feet at one epoch.
struct PositionFix {
  double t = 0.0;
  std::array<Vec3, 2> y{Vec3::Zero(), Vec3::Zero()};
  /// 0 = clean, 1 = right foot carries an injected outlier, 2 = left foot.
  int outlier_flag = 0;
};

/// Everything one estimation run consumes. All per-sample streams share the
/// same uniform time base t_k = k / imu_rate.
struct TrajectoryDataset {
  double imu_rate = 60.0;
  std::array<std::vector<TruthSample>, 2> truth;
  std::array<std::vector<ImuSample>, 2> imu;
  std::vector<PositionFix> fixes;
  std::vector<FootMask> stance_labels;
  /// Manifest key/value pairs: configs and seeds used to generate the data.
  std::map<std::string, std::string> metadata;

  std::size_t samples() const { return imu[0].size(); }
  double dt() const { return 1.0 / imu_rate; }
  const std::vector<TruthSample>& truth_of(Foot f) const { return truth[index(f)]; }
  const std::vector<ImuSample>& imu_of(Foot f) const { return imu[index(f)]; }

  /// Throws if stream lengths or timestamps are inconsistent.
  void validate() const;
};

/// Writes manifest.txt plus one CSV per stream into `dir` (created if absent).
void save_dataset(const std::filesystem::path& dir, const TrajectoryDataset& ds);
TrajectoryDataset load_dataset(const std::filesystem::path& dir);

/// key=value manifest helpers (UTF-8, LF line endings, '#' comments).
void write_key_values(const std::filesystem::path& path, const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

}  // namespace pednav
