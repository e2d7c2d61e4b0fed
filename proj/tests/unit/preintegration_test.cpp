#include <doctest/doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pednav/preintegration.hpp"
#include "pednav/simulation.hpp"
#include "test_support.hpp"

using namespace pednav;
using pednav::test::random_state;
using pednav::test::random_vec;
using pednav::test::rel_error;

namespace {

ImuNoiseModel noise() { return {}; }

std::vector<ImuSample> random_segment(std::mt19937_64& rng, int n) {
  std::vector<ImuSample> out(static_cast<std::size_t>(n));
  for (auto& u : out) {
    u.f_b = Vec3(0.0, 0.0, 9.80665) + random_vec(rng, 5.0);
    u.w_b = random_vec(rng, 2.0);
  }
  return out;
}

PreintegratedImu integrate(const std::vector<ImuSample>& seg, double dt, const Vec3& b_a, const Vec3& b_g) {
  PreintegratedImu acc(b_a, b_g);
  for (const auto& u : seg) acc = integrate_sample(acc, u, dt, noise());
  return acc;
}

}  // namespace

TEST_SUITE("preintegration") {
  TEST_CASE("empty accumulator") {
    const PreintegratedImu acc;
    CHECK(acc.dR.angularDistance(Quat::Identity()) == 0.0);
    CHECK(acc.dv.isZero());
    CHECK(acc.dp.isZero());
    CHECK(acc.sigma.isZero());
    CHECK(acc.dt_sum == 0.0);
    CHECK(acc.n == 0);
  }

  TEST_CASE("zero-motion samples integrate the gravity reaction") {
    PreintegratedImu acc;
    ImuSample u;
    u.f_b = Vec3(0.0, 0.0, 9.80665);
    for (int i = 0; i < 60; ++i) acc = integrate_sample(acc, u, 1.0 / 60.0, noise());
    const Vec3 g = gravity();
    CHECK((acc.dv - (-g * 1.0)).norm() < 1e-12);
    CHECK((acc.dp - (-0.5 * g * 1.0)).norm() < 1e-12);
    CHECK(acc.dt_sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(acc.n == 60);
  }

  TEST_CASE("constant yaw rate accumulates the closed-form rotation") {
    PreintegratedImu acc;
    ImuSample u;
    u.w_b = Vec3(0.0, 0.0, 1.0);
    for (int i = 0; i < 100; ++i) acc = integrate_sample(acc, u, 0.01, noise());
    CHECK(acc.dR.angularDistance(Quat(Eigen::AngleAxisd(1.0, Vec3::UnitZ()))) < 1e-6);
    CHECK(std::abs(acc.dR.norm() - 1.0) < 1e-9);
  }

  TEST_CASE("integrate_sample rejects bad input") {
    ImuSample u;
    u.f_b.x() = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(integrate_sample(PreintegratedImu{}, u, 0.01, noise()), std::invalid_argument);
    CHECK_THROWS_AS(integrate_sample(PreintegratedImu{}, ImuSample{}, 0.0, noise()), std::invalid_argument);
  }

  TEST_CASE("predict of an empty accumulator is the identity") {
    std::mt19937_64 rng(11);
    const NavState x = random_state(rng);
    const NavState y = predict(x, PreintegratedImu{});
    CHECK(y.p == x.p);
    CHECK(y.v == x.v);
  }

  TEST_CASE("predict equals iterated mechanize on random segments") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      const NavState x = random_state(rng);
      const auto seg = random_segment(rng, 60);
      const double dt = 1.0 / 60.0;
      NavState ref = x;
      for (const auto& u : seg) ref = mechanize(ref, u, dt);
      const NavState y = predict(x, integrate(seg, dt, x.b_a, x.b_g));
      CHECK((y.p - ref.p).norm() < 1e-9);
      CHECK((y.v - ref.v).norm() < 1e-9);
      CHECK(y.q.angularDistance(ref.q) < 1e-9);
    }
  }

  TEST_CASE("stationary second leaves the state unchanged") {
    NavState x;
    x.p = Vec3(1.0, 2.0, 0.0);
    x.q = Quat(Eigen::AngleAxisd(0.7, Vec3(0.2, 0.3, 1.0).normalized()));
    ImuSample u;
    u.f_b = x.q.conjugate() * (-gravity());
    PreintegratedImu acc;
    for (int i = 0; i < 60; ++i) acc = integrate_sample(acc, u, 1.0 / 60.0, noise());
    const NavState y = predict(x, acc);
    CHECK((y.p - x.p).norm() < 1e-9);
    CHECK(y.v.norm() < 1e-9);
    CHECK(y.q.angularDistance(x.q) < 1e-9);
  }

  TEST_CASE("residual vanishes at the prediction") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
      const NavState x = random_state(rng);
      const auto acc = integrate(random_segment(rng, 6), 1.0 / 60.0, x.b_a, x.b_g);
      CHECK(residual(x, predict(x, acc), acc).r.norm() < 1e-9);
    }
  }

  TEST_CASE("a position perturbation appears only in the position rows") {
    std::mt19937_64 rng(14);
    const NavState x = random_state(rng);
    const auto acc = integrate(random_segment(rng, 6), 1.0 / 60.0, x.b_a, x.b_g);
    NavState xj = predict(x, acc);
    xj.p += Vec3(0.1, 0.0, 0.0);
    const Vec15 r = residual(x, xj, acc).r;
    CHECK((r.segment<3>(6) - x.R().transpose() * Vec3(0.1, 0.0, 0.0)).norm() < 1e-9);
    CHECK(r.head<6>().norm() < 1e-9);
    CHECK(r.tail<6>().norm() < 1e-9);
  }

  TEST_CASE("degenerate factor is rejected") {
    NavState x;
    CHECK_THROWS_AS(residual(x, x, PreintegratedImu{}), std::invalid_argument);
    CHECK_THROWS_AS(preint_sqrt_information(PreintegratedImu{}, noise()), std::invalid_argument);
  }

  TEST_CASE("residual Jacobians match central differences") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 100; ++trial) {
      const NavState xi = random_state(rng);
      const Vec3 lin_ba = xi.b_a + random_vec(rng, 0.02);
      const Vec3 lin_bg = xi.b_g + random_vec(rng, 0.005);
      const auto acc = integrate(random_segment(rng, 6), 1.0 / 60.0, lin_ba, lin_bg);
      NavState xj = predict(xi, acc);
      ErrorVector d;
      d << random_vec(rng, 0.1), random_vec(rng, 0.1), random_vec(rng, 0.1), random_vec(rng, 0.01),
          random_vec(rng, 0.01);
      xj = retract(xj, d);
      const PreintResidual res = residual(xi, xj, acc);
      const auto fi = [&](const NavState& s) -> Eigen::VectorXd { return residual(s, xj, acc).r; };
      const auto fj = [&](const NavState& s) -> Eigen::VectorXd { return residual(xi, s, acc).r; };
      CHECK(rel_error(res.J_i, test::numeric_jacobian(fi, xi)) < 1e-5);
      CHECK(rel_error(res.J_j, test::numeric_jacobian(fj, xj)) < 1e-5);
    }
  }

  TEST_CASE("covariance is symmetric, semi-definite and grows") {
    std::mt19937_64 rng(16);
    PreintegratedImu acc;
    double prev = 0.0;
    for (const auto& u : random_segment(rng, 120)) {
      acc = integrate_sample(acc, u, 1.0 / 60.0, noise());
      CHECK(acc.sigma.trace() >= prev);
      prev = acc.sigma.trace();
      CHECK((acc.sigma - acc.sigma.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    }
    Eigen::SelfAdjointEigenSolver<Mat9> es(acc.sigma);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }

  TEST_CASE("first-order bias correction has second-order error") {
    std::mt19937_64 rng(17);
    const auto seg = random_segment(rng, 60);
    const double dt = 1.0 / 60.0;
    const Vec3 b_a(0.01, -0.02, 0.005), b_g(0.001, 0.002, -0.001);
    const auto acc = integrate(seg, dt, b_a, b_g);
    const Vec3 dir_a = random_vec(rng, 1.0).normalized(), dir_g = random_vec(rng, 1.0).normalized();
    std::vector<double> xs, ys;
    for (double eps : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
      const Vec3 na = b_a + eps * dir_a, ng = b_g + eps * dir_g;
      const CorrectedIncrements c = correct_for_bias(acc, na, ng);
      const PreintegratedImu re = integrate(seg, dt, na, ng);
      const double e = (c.dv - re.dv).norm() + (c.dp - re.dp).norm() + so3::log(c.dR.conjugate() * re.dR).norm();
      xs.push_back(std::log(eps));
      ys.push_back(std::log(e));
    }
    // Least-squares slope of log error against log eps.
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 1.9);
  }

  TEST_CASE("predict matches iterated mechanize on zero-noise gait segments") {
    GaitConfig gc;
    gc.duration = 10.0;
    const GroundTruth gt = generate_gait(gc);
    ImuErrorConfig ie;
    ie.noise = ImuNoiseModel{0.0, 0.0, 0.0, 0.0};
    const auto imu = synthesize_imu(gt, ie);
    const double dt = 1.0 / gc.imu_rate;
    for (Foot f : kFeet) {
      for (int start = 0; start + 60 < static_cast<int>(imu[0].size()); start += 37) {
        NavState x;
        const auto& t = gt.feet[index(f)][static_cast<std::size_t>(start)];
        x.p = t.p;
        x.v = t.v;
        x.q = t.q;
        PreintegratedImu acc;
        NavState ref = x;
        for (int k = start; k < start + 60; ++k) {
          acc = integrate_sample(acc, imu[index(f)][static_cast<std::size_t>(k)], dt, noise());
          ref = mechanize(ref, imu[index(f)][static_cast<std::size_t>(k)], dt);
        }
        const NavState y = predict(x, acc);
        CHECK((y.p - ref.p).norm() < 1e-9);
        CHECK(y.q.angularDistance(ref.q) < 1e-9);
      }
    }
  }
}
