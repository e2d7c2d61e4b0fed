#include "pednav/zupt.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pednav/csv.hpp"

namespace pednav {

void StanceDetectorConfig::validate() const {
  if (!(acc_thresh > 0.0) || !(gyro_thresh > 0.0) || window < 1 || min_duration < 1) {
    throw std::invalid_argument("StanceDetectorConfig: thresholds and durations must be positive");
  }
}

std::vector<bool> detect_stance(std::span<const ImuSample> stream, const StanceDetectorConfig& cfg) {
  cfg.validate();
  if (stream.empty()) throw std::invalid_argument("detect_stance: empty IMU stream");

  const int n = static_cast<int>(stream.size());
  std::vector<double> acc_norm(n), gyro_norm(n);
  for (int i = 0; i < n; ++i) {
    acc_norm[i] = stream[i].f_b.norm();
    gyro_norm[i] = stream[i].w_b.norm();
  }

  const int half = cfg.window / 2;
  std::vector<bool> raw(n, false);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + (cfg.window - 1 - half));
    double sa = 0.0, sg = 0.0;
    for (int k = lo; k <= hi; ++k) {
      sa += acc_norm[k];
      sg += gyro_norm[k];
    }
    const double cnt = hi - lo + 1;
    raw[i] = std::abs(sa / cnt - cfg.gravity) < cfg.acc_thresh && sg / cnt < cfg.gyro_thresh;
  }

  std::vector<bool> out(n, false);
  int i = 0;
  while (i < n) {
    if (!raw[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && raw[j]) ++j;
    if (j - i >= cfg.min_duration) {
      for (int k = i; k < j; ++k) out[k] = true;
    }
    i = j;
  }
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, err::kJointDim> zupt_measurement_matrix(FootMask mask) {
  if (!mask.any()) throw std::invalid_argument("zupt: no foot flagged as stance");
  Eigen::Matrix<double, Eigen::Dynamic, err::kJointDim> H(3 * mask.count(), err::kJointDim);
  H.setZero();
  int row = 0;
  for (Foot f : kFeet) {
    if (!mask[f]) continue;
    H.block<3, 3>(row, joint_offset(f) + err::kVel).setIdentity();
    row += 3;
  }
  return H;
}

ZuptResidual zupt_residual(const JointState& x, FootMask mask) {
  ZuptResidual out;
  out.H = zupt_measurement_matrix(mask);
  out.r.resize(out.H.rows());
  int row = 0;
  for (Foot f : kFeet) {
    if (!mask[f]) continue;
    out.r.segment<3>(row) = -x[f].v;
    row += 3;
  }
  return out;
}

void write_stance_csv(const std::filesystem::path& path, const StanceMask& mask) {
  CsvWriter w(path);
  w.header({"t", "right", "left"});
  for (std::size_t k = 0; k < mask.size(); ++k) {
    w.row(mask.t[k], mask.feet[k].right ? 1 : 0, mask.feet[k].left ? 1 : 0);
  }
}

}  // namespace pednav
