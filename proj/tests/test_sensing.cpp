#include <doctest.h>

#include <cmath>

#include "dockbench/sensing.hpp"

using namespace dockbench;

TEST_CASE("noise-free sensing is an identity channel") {
  SensorConfig cfg;  // all noise, latency, clock terms default to zero
  RigidState truth;
  truth.position = Eigen::Vector3d(1.0, -2.0, 0.5);
  truth.yaw = 0.7;
  truth.yaw_rate = -0.3;
  Rng rng(1);

  const auto mocap = sample_mocap(truth, cfg, 3.25, rng);
  REQUIRE(mocap.has_value());
  CHECK(mocap->position == truth.position);
  CHECK(mocap->yaw == truth.yaw);
  CHECK(mocap->stamp == 3.25);

  const Eigen::Vector3d applied(0.1, 0.0, -0.2);
  const ImuSample imu = sample_imu(truth, applied, cfg, 3.25, rng);
  CHECK(imu.accel == applied);
  CHECK(imu.gyro_z == truth.yaw_rate);
}

TEST_CASE("certain dropout yields no sample") {
  SensorConfig cfg;
  cfg.dropout_prob = 1.0;
  Rng rng(2);
  for (int i = 0; i < 50; ++i)
    CHECK_FALSE(sample_mocap(RigidState{}, cfg, 0.1 * i, rng).has_value());
}

TEST_CASE("gyro bias is purely additive") {
  SensorConfig cfg;
  cfg.gyro_bias = 0.01;
  RigidState truth;
  truth.yaw_rate = 0.4;
  Rng rng(3);
  const ImuSample imu = sample_imu(truth, Eigen::Vector3d::Zero(), cfg, 0.0, rng);
  CHECK(imu.gyro_z == doctest::Approx(0.41).epsilon(1e-15));
}

TEST_CASE("sampled noise matches the configured standard deviations") {
  SensorConfig cfg;
  cfg.mocap_pos_noise = 0.001;
  cfg.gyro_noise = 0.002;
  RigidState truth;
  Rng rng(4);

  const int n = 100000;
  double pos_sq = 0.0, gyro_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto m = sample_mocap(truth, cfg, 0.0, rng);
    pos_sq += m->position.x() * m->position.x();
    const ImuSample imu = sample_imu(truth, Eigen::Vector3d::Zero(), cfg, 0.0, rng);
    gyro_sq += imu.gyro_z * imu.gyro_z;
  }
  CHECK(std::sqrt(pos_sq / n) == doctest::Approx(0.001).epsilon(0.05));
  CHECK(std::sqrt(gyro_sq / n) == doctest::Approx(0.002).epsilon(0.05));
}

TEST_CASE("host clock is affine in true time") {
  SensorConfig cfg;
  CHECK(host_timestamp(12.5, cfg) == 12.5);
  cfg.clock_offset = 0.002;
  CHECK(host_timestamp(10.0, cfg) == doctest::Approx(10.002).epsilon(1e-15));
  cfg.clock_offset = 0.0;
  cfg.clock_drift = 1e-6;
  CHECK(host_timestamp(100.0, cfg) == doctest::Approx(100.0001).epsilon(1e-12));
}

TEST_CASE("mocap stamps increase along a fixed-rate stream") {
  SensorConfig cfg;
  cfg.clock_drift = 1e-5;
  cfg.clock_offset = 0.01;
  Rng rng(5);
  double prev = -1.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = k / cfg.mocap_rate;
    const auto m = sample_mocap(RigidState{}, cfg, t, rng);
    REQUIRE(m.has_value());
    CHECK(m->stamp > prev);
    prev = m->stamp;
  }
}

TEST_CASE("the delay queue releases samples after the configured latency") {
  SensorConfig cfg;
  cfg.mocap_latency = 0.005;
  Rng rng(6);
  MocapDelayQueue queue;
  const auto s = sample_mocap(RigidState{}, cfg, 1.0, rng);
  queue.push(*s, 1.0, cfg);

  CHECK(queue.pop_due(1.0).empty());
  CHECK(queue.pop_due(1.004).empty());
  const auto due = queue.pop_due(1.005);
  REQUIRE(due.size() == 1);
  CHECK(due[0].stamp == 1.0);
  CHECK(queue.empty());
}

TEST_CASE("equal seeds give bit-identical sample streams") {
  SensorConfig cfg;
  cfg.mocap_pos_noise = 0.01;
  cfg.mocap_yaw_noise = 0.02;
  cfg.dropout_prob = 0.1;
  Rng a(77), b(77);
  RigidState truth;
  truth.position = Eigen::Vector3d(0.3, 0.1, 2.0);
  for (int k = 0; k < 500; ++k) {
    const auto ma = sample_mocap(truth, cfg, k * 0.01, a);
    const auto mb = sample_mocap(truth, cfg, k * 0.01, b);
    REQUIRE(ma.has_value() == mb.has_value());
    if (ma) {
      CHECK(ma->position == mb->position);
      CHECK(ma->yaw == mb->yaw);
    }
  }
}
