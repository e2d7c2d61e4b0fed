#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pednav/simulation.hpp"

namespace pednav {

namespace {

constexpr double kPi = std::numbers::pi;

class CyclicPath {
 public:
  explicit CyclicPath(const std::vector<Eigen::Vector2d>& pts) : pts_(pts) {
    if (pts_.size() < 2) throw std::invalid_argument("generate_gait: path needs at least two waypoints");
    if ((pts_.front() - pts_.back()).norm() > 1e-12) pts_.push_back(pts_.front());
    cum_.assign(1, 0.0);
    for (std::size_t i = 1; i < pts_.size(); ++i) cum_.push_back(cum_.back() + (pts_[i] - pts_[i - 1]).norm());
    if (!(length() > 0.0) || !std::isfinite(length())) {
      throw std::invalid_argument("generate_gait: degenerate path (zero length)");
    }
  }

  double length() const { return cum_.back(); }

  Eigen::Vector2d position(double s) const {
    s = std::fmod(s, length());
    if (s < 0.0) s += length();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), 1, cum_.size() - 1);
    const double seg = cum_[i] - cum_[i - 1];
    const double u = seg > 0.0 ? (s - cum_[i - 1]) / seg : 0.0;
    return pts_[i - 1] + u * (pts_[i] - pts_[i - 1]);
  }

  double heading(double s) const {
    constexpr double h = 0.25;
    const Eigen::Vector2d d = position(s + h) - position(s - h);
    return std::atan2(d.y(), d.x());
  }

 private:
  std::vector<Eigen::Vector2d> pts_;
  std::vector<double> cum_;
};

struct Footprint {
  Vec3 p;
  double yaw;
};

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Quat attitude(double yaw, double pitch) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())) * Quat(Eigen::AngleAxisd(pitch, Vec3::UnitY()));
}

}  // namespace

std::vector<Eigen::Vector2d> GaitConfig::default_path() {
  constexpr int kPerCircle = 72;
  constexpr double R = 1.5;
  std::vector<Eigen::Vector2d> pts;
  // Clockwise around the right circle, then counter-clockwise around the
  // left one; both pass through the origin heading north.
  for (int i = 0; i < kPerCircle; ++i) {
    const double th = kPi - 2.0 * kPi * i / kPerCircle;
    pts.emplace_back(R + R * std::cos(th), R * std::sin(th));
  }
  for (int i = 0; i < kPerCircle; ++i) {
    const double th = 2.0 * kPi * i / kPerCircle;
    pts.emplace_back(-R + R * std::cos(th), R * std::sin(th));
  }
  return pts;
}

void GaitConfig::validate() const {
  if (!(stance_ratio > 0.0 && stance_ratio < 1.0)) throw std::invalid_argument("GaitConfig: stance_ratio must be in (0,1)");
  if (!(imu_rate > 0.0)) throw std::invalid_argument("GaitConfig: imu_rate must be positive");
  if (!(cadence > 0.0)) throw std::invalid_argument("GaitConfig: cadence must be positive");
  if (!(step_length > 0.0) || !(step_width >= 0.0) || !(duration > 0.0) || !(foot_lift >= 0.0)) {
    throw std::invalid_argument("GaitConfig: lengths and duration must be positive");
  }
}

GroundTruth generate_gait(const GaitConfig& cfg) {
  cfg.validate();
  const CyclicPath path(cfg.path);
  if (path.length() < 2.0 * cfg.step_length) {
    throw std::invalid_argument("generate_gait: degenerate path (shorter than one stride)");
  }

  std::mt19937_64 rng(cfg.seed);
  const double s0 = std::uniform_real_distribution<double>(0.0, path.length())(rng);

  const double Tc = cfg.cycle_period();
  const double T_stance = cfg.stance_ratio * Tc;
  const double T_swing = Tc - T_stance;

  auto footprint = [&](long n, Foot f) {
    const double s = s0 + static_cast<double>(n) * cfg.step_length;
    const Eigen::Vector2d c = path.position(s);
    const double yaw = path.heading(s);
    const Eigen::Vector2d normal(-std::sin(yaw), std::cos(yaw));
    const double side = (f == Foot::kRight ? -0.5 : 0.5) * cfg.step_width;
    const Eigen::Vector2d xy = c + side * normal;
    return Footprint{Vec3(xy.x(), xy.y(), 0.0), yaw};
  };

  struct Pose {
    Vec3 v;
    Quat q;
    bool stance;
  };
  auto pose = [&](double t, Foot f) {
    const double local = f == Foot::kRight ? t : t - 0.5 * Tc;
    const long k = static_cast<long>(std::floor(local / Tc));
    const double tau = local - static_cast<double>(k) * Tc;
    const long n = 2 * k + (f == Foot::kRight ? 0 : 1);
    const Footprint a = footprint(n, f);
    if (tau < T_stance) return Pose{Vec3::Zero(), attitude(a.yaw, 0.0), true};

    const Footprint b = footprint(n + 2, f);
    const double s = (tau - T_stance) / T_swing;
    const double c = s - std::sin(2.0 * kPi * s) / (2.0 * kPi);
    const double dc = 1.0 - std::cos(2.0 * kPi * s);
    const double sp = std::sin(kPi * s), cp = std::cos(kPi * s);

    Vec3 v = (b.p - a.p) * dc / T_swing;
    v.z() = cfg.foot_lift * 4.0 * kPi * sp * sp * sp * cp / T_swing;
    const double yaw = a.yaw + wrap_angle(b.yaw - a.yaw) * c;
    const double pitch = cfg.swing_pitch * sp * sp * sp;
    return Pose{v, attitude(yaw, pitch), false};
  };

  const auto n_samples = static_cast<std::size_t>(std::llround(cfg.duration * cfg.imu_rate));
  const double dt = 1.0 / cfg.imu_rate;

  GroundTruth gt;
  gt.imu_rate = cfg.imu_rate;
  for (Foot f : kFeet) {
    auto& out = gt.feet[index(f)];
    out.reserve(n_samples + 1);
    Vec3 p = footprint(f == Foot::kRight ? 0 : -1, f).p;
    for (std::size_t k = 0; k <= n_samples; ++k) {
      const double t = static_cast<double>(k) / cfg.imu_rate;
      const Pose ps = pose(t, f);
      if (k > 0) p = p + 0.5 * (out.back().v + ps.v) * dt;
      out.push_back({t, p, ps.v, ps.q});
      if (f == Foot::kRight) gt.stance.push_back({ps.stance, false});
      else gt.stance[k].left = ps.stance;
    }
  }

  for (long k = 0; static_cast<double>(k) * Tc < cfg.duration; ++k) {
    gt.phases[0].push_back({k * Tc, k * Tc + T_stance});
  }
  for (long k = -1; (static_cast<double>(k) + 0.5) * Tc < cfg.duration; ++k) {
    const double start = (static_cast<double>(k) + 0.5) * Tc;
    if (start + T_stance > 0.0) gt.phases[1].push_back({start, start + T_stance});
  }

  for (std::size_t k = 0; k <= n_samples; ++k) {
    gt.max_separation = std::max(gt.max_separation, (gt.feet[0][k].p - gt.feet[1][k].p).norm());
  }
  return gt;
}

}  // namespace pednav
