#include <cmath>
#include <random>
#include <stdexcept>

#include "pednav/simulation.hpp"

namespace pednav {

void CorruptionConfig::validate() const {
  if (!(pos_sigma >= 0.0)) throw std::invalid_argument("CorruptionConfig: pos_sigma must be >= 0");
  if (!(pos_interval > 0.0)) throw std::invalid_argument("CorruptionConfig: pos_interval must be > 0");
  if (!(outlier_prob >= 0.0 && outlier_prob <= 1.0)) {
    throw std::invalid_argument("CorruptionConfig: outlier_prob must be in [0,1]");
  }
  if (outlier_prob > 0.0 && outlier_set.empty()) {
    throw std::invalid_argument("CorruptionConfig: outlier_set is empty");
  }
}

std::vector<PositionFix> corrupt_positions(const GroundTruth& truth, std::size_t samples,
                                           const CorruptionConfig& cfg) {
  cfg.validate();
  samples = std::min(samples, truth.epochs());
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<PositionFix> fixes;
  for (long m = 0;; ++m) {
    const double t = static_cast<double>(m) * cfg.pos_interval;
    const auto k = static_cast<std::size_t>(std::llround(t * truth.imu_rate));
    if (k >= samples) break;

    PositionFix fx;
    fx.t = truth.feet[0][k].t;
    for (int f = 0; f < 2; ++f) {
      fx.y[f] = truth.feet[f][k].p;
      for (int i = 0; i < 3; ++i) fx.y[f][i] += cfg.pos_sigma * noise(rng);
    }
    if (unit(rng) < cfg.outlier_prob) {
      const int foot = static_cast<int>(unit(rng) * 2.0) % 2;
      const int axis = static_cast<int>(unit(rng) * 3.0) % 3;
      const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
      const auto pick = static_cast<std::size_t>(unit(rng) * static_cast<double>(cfg.outlier_set.size())) %
                        cfg.outlier_set.size();
      fx.y[foot][axis] += sign * cfg.outlier_set[pick];
      fx.outlier_flag = foot + 1;
    }
    fixes.push_back(fx);
  }
  return fixes;
}

}  // namespace pednav
