#include <cmath>
#include <random>
#include <stdexcept>

#include "pednav/simulation.hpp"

namespace pednav {

std::array<ImuBias, 2> draw_initial_biases(double sigma_ba, double sigma_bg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::array<ImuBias, 2> out;
  for (auto& b : out) {
    for (int i = 0; i < 3; ++i) b.b_a[i] = sigma_ba * n01(rng);
    for (int i = 0; i < 3; ++i) b.b_g[i] = sigma_bg * n01(rng);
  }
  return out;
}

std::array<std::vector<ImuSample>, 2> synthesize_imu(const GroundTruth& truth, const ImuErrorConfig& cfg,
                                                     const GravityModel& gravity) {
  const auto& nm = cfg.noise;
  if (nm.sigma_a < 0.0 || nm.sigma_g < 0.0 || nm.sigma_ba < 0.0 || nm.sigma_bg < 0.0) {
    throw std::invalid_argument("synthesize_imu: noise densities must be non-negative");
  }
  if (truth.epochs() < 2) throw std::invalid_argument("synthesize_imu: need at least two truth epochs");

  const double dt = 1.0 / truth.imu_rate;
  const double sd_a = nm.sigma_a / std::sqrt(dt);
  const double sd_g = nm.sigma_g / std::sqrt(dt);
  const double sd_ba = nm.sigma_ba * std::sqrt(dt);
  const double sd_bg = nm.sigma_bg * std::sqrt(dt);
  const Vec3 g = gravity.vector();

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto draw = [&](double sd) { return Vec3(sd * n01(rng), sd * n01(rng), sd * n01(rng)); };

  std::array<std::vector<ImuSample>, 2> out;
  for (Foot f : kFeet) {
    const auto& tr = truth.feet[index(f)];
    auto& stream = out[index(f)];
    stream.reserve(tr.size() - 1);
    Vec3 b_a = cfg.bias0[index(f)].b_a;
    Vec3 b_g = cfg.bias0[index(f)].b_g;
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
      const Vec3 w = so3::log(tr[k].q.conjugate() * tr[k + 1].q) / dt;
      const Quat q_mid = tr[k].q * so3::exp(0.5 * w * dt);
      const Vec3 f_b = q_mid.conjugate() * ((tr[k + 1].v - tr[k].v) / dt - g);

      ImuSample s;
      s.t = tr[k].t;
      s.f_b = f_b + b_a;
      s.w_b = w + b_g;
      if (sd_a > 0.0) s.f_b += draw(sd_a);
      if (sd_g > 0.0) s.w_b += draw(sd_g);
      stream.push_back(s);

      if (sd_ba > 0.0) b_a += draw(sd_ba);
      if (sd_bg > 0.0) b_g += draw(sd_bg);
    }
  }
  return out;
}

}  // namespace pednav
