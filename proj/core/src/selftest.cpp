#include "pednav/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>

#include "pednav/pipeline.hpp"

namespace pednav {

bool SelftestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SelftestCheck& c) { return c.passed; });
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

SelftestCheck softmax_check() {
  double worst = 0.0;
  for (double alpha : {1.0, 10.0, 50.0, 1000.0}) {
    worst = std::max(worst, std::abs(softmax_penalty(0.0, alpha) - std::numbers::ln2 / alpha));
    for (int i = 0; i <= 400; ++i) {
      const double delta = -2.0 + 0.01 * i;
      const double gap = softmax_penalty(delta, alpha) - std::max(0.0, delta);
      if (gap < 0.0 || gap > std::numbers::ln2 / alpha) worst = 1.0;
    }
  }
  return {"softmax bound", worst < 1e-12, "max error " + sci(worst)};
}

SelftestCheck penalty_gradient_check() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DistanceConstraint c;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    JointState x;
    x[Foot::kRight].p = Vec3(u(rng), u(rng), u(rng));
    x[Foot::kLeft].p = x[Foot::kRight].p + (1.0 + 0.5 * u(rng)) * Vec3(u(rng), u(rng), u(rng)).normalized();
    const PenaltyEvaluation e = penalty_factor(x, c);
    JointErrorVector fd;
    const double h = 1e-7;
    for (int k = 0; k < err::kJointDim; ++k) {
      JointErrorVector d = JointErrorVector::Zero();
      d(k) = h;
      fd(k) = (penalty_factor(retract(x, d), c).cost - penalty_factor(retract(x, -d), c).cost) / (2.0 * h);
    }
    worst = std::max(worst, (e.gradient - fd).norm() / std::max(fd.norm(), 1e-12));
  }
  return {"penalty gradient", worst < 1e-5, "max relative error " + sci(worst)};
}

SelftestCheck preintegration_check() {
  GaitConfig gc;
  gc.duration = 5.0;
  const GroundTruth gt = generate_gait(gc);
  ImuErrorConfig ie;
  ie.noise = ImuNoiseModel{0.0, 0.0, 0.0, 0.0};
  const auto imu = synthesize_imu(gt, ie);
  const double dt = 1.0 / gc.imu_rate;
  double worst = 0.0;
  for (std::size_t start = 0; start + 60 < imu[0].size(); start += 41) {
    NavState x;
    x.p = gt.feet[0][start].p;
    x.v = gt.feet[0][start].v;
    x.q = gt.feet[0][start].q;
    NavState ref = x;
    PreintegratedImu acc;
    for (std::size_t k = start; k < start + 60; ++k) {
      acc = integrate_sample(acc, imu[0][k], dt, ImuNoiseModel{});
      ref = mechanize(ref, imu[0][k], dt);
    }
    const NavState y = predict(x, acc);
    worst = std::max({worst, (y.p - ref.p).norm(), y.q.angularDistance(ref.q)});
  }
  return {"preintegration vs strapdown", worst < 1e-9, "max gap " + sci(worst)};
}

SelftestCheck projection_check() {
  EkfState s;
  s.x[Foot::kLeft].p = Vec3(1.0, 0.0, 0.0);
  DistanceConstraint c;
  c.d = 0.8;
  const EkfState out = project_distance(s, c);
  const double e = (out.x[Foot::kRight].p - Vec3(0.1, 0, 0)).norm() + (out.x[Foot::kLeft].p - Vec3(0.9, 0, 0)).norm();
  return {"distance projection", e < 1e-9, "error " + sci(e)};
}

SelftestCheck pipeline_check() {
  PipelineConfig cfg;
  cfg.sim.gait.duration = 15.0;
  const TrajectoryDataset ds = simulate_dataset(cfg.sim);
  double worst = 0.0;
  for (Method m : {Method::kEkfZuptPosStep, Method::kFgoZuptPosStep}) {
    const MethodResult r = run_method(ds, m, cfg);
    worst = std::max({worst, r.report.stats[0].rms, r.report.stats[1].rms});
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst RMS %.3f m over 15 s", worst);
  return {"end-to-end run", std::isfinite(worst) && worst < 0.5, buf};
}

}  // namespace

SelftestReport run_selftest() {
  SelftestReport report;
  const std::function<SelftestCheck()> checks[] = {softmax_check, penalty_gradient_check, preintegration_check,
                                                   projection_check, pipeline_check};
  for (const auto& check : checks) {
    try {
      report.checks.push_back(check());
    } catch (const std::exception& e) {
      report.checks.push_back({"exception", false, e.what()});
    }
  }
  return report;
}

}  // namespace pednav
