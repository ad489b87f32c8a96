#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dockbench/angles.hpp"
#include "dockbench/estimation.hpp"
#include "dockbench/random.hpp"

using namespace dockbench;

namespace {

EstimatedState some_estimate(double p0 = 0.05) {
  EkfParams params;
  params.p0 = p0;
  MocapSample z;
  z.position = Eigen::Vector3d(1.0, 2.0, 0.5);
  z.yaw = 0.3;
  z.stamp = 0.0;
  return ekf_init(z, params);
}

ImuSample quiet_imu(double stamp) {
  ImuSample imu;
  imu.stamp = stamp;
  return imu;
}

}  // namespace

TEST_CASE("stationary prediction keeps the mean and inflates covariance") {
  const EstimatedState est = some_estimate();
  const EstimatedState next = ekf_predict(est, quiet_imu(0.1), EkfParams{}, 0.1);
  CHECK(next.x == est.x);
  CHECK(next.cov.trace() > est.cov.trace());
}

TEST_CASE("prediction integrates velocity into position") {
  EstimatedState est = some_estimate();
  est.x[3] = 1.0;  // vx
  const EstimatedState next = ekf_predict(est, quiet_imu(0.1), EkfParams{}, 0.1);
  CHECK(next.x[0] == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(next.x[3] == 1.0);
}

TEST_CASE("prediction applies the imu acceleration as control input") {
  EstimatedState est = some_estimate();
  ImuSample imu;
  imu.accel = Eigen::Vector3d(2.0, 0.0, 0.0);
  imu.stamp = 0.1;
  const EstimatedState next = ekf_predict(est, imu, EkfParams{}, 0.1);
  CHECK(next.x[3] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(next.x[0] == doctest::Approx(1.0 + 0.5 * 2.0 * 0.01).epsilon(1e-12));
}

TEST_CASE("a near-exact measurement pins the posterior to it") {
  EkfParams params;
  params.r_pos = 1e-9;
  params.r_yaw = 1e-9;
  params.gate_sigma = 1e9;
  EstimatedState est = some_estimate(0.5);
  MocapSample z;
  z.position = Eigen::Vector3d(1.3, 1.7, 0.6);
  z.yaw = 0.5;
  z.stamp = 0.1;
  const EstimatedState next = ekf_update_mocap(est, z, params);
  CHECK((next.position() - z.position).norm() < 1e-6);
  CHECK(std::abs(next.yaw() - z.yaw) < 1e-6);
}

TEST_CASE("zero innovation keeps the mean and shrinks covariance") {
  EstimatedState est = some_estimate();
  MocapSample z;
  z.position = est.position();
  z.yaw = est.yaw();
  z.stamp = 0.1;
  const EstimatedState next = ekf_update_mocap(est, z, EkfParams{});
  CHECK((next.x - est.x).norm() < 1e-14);
  CHECK(next.cov.trace() < est.cov.trace());
}

TEST_CASE("yaw innovation wraps across the branch cut") {
  EkfParams params;
  params.r_pos = 1e-9;
  params.r_yaw = 1e-9;
  EstimatedState est = some_estimate(0.05);
  est.x[6] = 3.1;
  MocapSample z;
  z.position = est.position();
  z.yaw = -3.1;
  z.stamp = 0.1;
  // wrapped innovation is +0.083..., so the posterior crosses the cut to -3.1
  const EstimatedState next = ekf_update_mocap(est, z, params);
  CHECK(next.yaw() == doctest::Approx(-3.1).epsilon(1e-6));
  CHECK(next.yaw() > -std::numbers::pi);
  CHECK(next.yaw() <= std::numbers::pi);
}

TEST_CASE("stale and gated measurements leave the estimate unchanged") {
  EstimatedState est = some_estimate();
  est.stamp = 1.0;

  MocapSample stale;
  stale.position = est.position();
  stale.yaw = est.yaw();
  stale.stamp = 0.5;
  UpdateInfo info;
  CHECK(ekf_update_mocap(est, stale, EkfParams{}, &info).x == est.x);
  CHECK(info.rejected_stale);

  MocapSample outlier;
  outlier.position = est.position() + Eigen::Vector3d(50.0, 0.0, 0.0);
  outlier.yaw = est.yaw();
  outlier.stamp = 1.5;
  CHECK(ekf_update_mocap(est, outlier, EkfParams{}, &info).x == est.x);
  CHECK(info.rejected_gate);
}

TEST_CASE("covariance stays symmetric positive-definite through a random run") {
  Rng rng(31);
  EkfParams params;
  EstimatedState est = some_estimate();
  double t = 0.0;
  for (int k = 0; k < 2000; ++k) {
    ImuSample imu;
    imu.accel = Eigen::Vector3d(draw_normal(rng), draw_normal(rng), draw_normal(rng));
    imu.gyro_z = draw_normal(rng);
    t += 0.002;
    imu.stamp = t;
    est = ekf_predict(est, imu, params, 0.002);
    if (k % 4 == 3) {
      MocapSample z;
      z.position = est.position() + 0.003 * Eigen::Vector3d(draw_normal(rng),
                                                            draw_normal(rng),
                                                            draw_normal(rng));
      z.yaw = wrap_angle(est.yaw() + 0.005 * draw_normal(rng));
      z.stamp = t;
      const double trace_before = est.cov.trace();
      est = ekf_update_mocap(est, z, params);
      CHECK(est.cov.trace() <= trace_before + 1e-12);
    }
    CHECK((est.cov - est.cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(Eigen::LLT<Matrix7d>(est.cov).info() == Eigen::Success);
    CHECK(est.yaw() > -std::numbers::pi);
    CHECK(est.yaw() <= std::numbers::pi);
  }
}

TEST_CASE("nees is zero at the truth and scales inversely with covariance") {
  EstimatedState est = some_estimate();
  RigidState truth;
  truth.position = est.position();
  truth.velocity = est.velocity();
  truth.yaw = est.yaw();
  CHECK(nees(est, truth) == doctest::Approx(0.0));

  truth.position.x() += 0.1;
  const double base = nees(est, truth);
  EstimatedState wide = est;
  wide.cov *= 2.0;
  CHECK(nees(wide, truth) == doctest::Approx(0.5 * base).epsilon(1e-9));
}

TEST_CASE("singular covariance raises a numeric failure") {
  EstimatedState est = some_estimate();
  est.cov.setZero();
  CHECK_THROWS_AS(nees(est, RigidState{}), NumericError);
}
