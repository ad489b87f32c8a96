#pragma once

#include <Eigen/Dense>
#include <deque>
#include <optional>
#include <vector>

#include "dockbench/random.hpp"
#include "dockbench/types.hpp"

namespace dockbench {

/// Motion-capture pose sample, stamped with the host clock.
struct MocapSample {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double stamp = 0.0;
};

/// Inertial sample in the reduced model: world-frame specific-force proxy
/// plus vertical-axis angular rate.
struct ImuSample {
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
  double gyro_z = 0.0;
  double stamp = 0.0;
};

struct SensorConfig {
  double mocap_rate = 120.0;     // [Hz]
  double imu_rate = 500.0;       // [Hz]
  double mocap_pos_noise = 0.0;  // per-axis std [m]
  double mocap_yaw_noise = 0.0;  // std [rad]
  double accel_noise = 0.0;      // per-axis std [m/s^2]
  double gyro_noise = 0.0;       // std [rad/s]
  double gyro_bias = 0.0;        // [rad/s]
  double mocap_latency = 0.0;    // delivery delay [s]
  double dropout_prob = 0.0;     // per-sample drop probability
  double clock_offset = 0.0;     // [s]
  double clock_drift = 0.0;      // [s/s]
};

/// Affine host-clock model applied to all sensor stamps.
double host_timestamp(double t_true, const SensorConfig& cfg);

/// Draws one mocap sample of the given truth, or nothing on dropout.
/// Consumes one uniform (dropout) and, if kept, four normals.
std::optional<MocapSample> sample_mocap(const RigidState& truth, const SensorConfig& cfg,
                                        double t_true, Rng& rng);

/// Draws one IMU sample: applied acceleration plus noise, gyro with bias.
ImuSample sample_imu(const RigidState& truth, const Eigen::Vector3d& applied_accel,
                     const SensorConfig& cfg, double t_true, Rng& rng);

/// Delivery-delay queue for mocap samples: samples become visible to
/// consumers mocap_latency after their true sampling time.
class MocapDelayQueue {
 public:
  void push(const MocapSample& sample, double t_true, const SensorConfig& cfg);
  /// Pops all samples whose delivery time has passed, in delivery order.
  std::vector<MocapSample> pop_due(double t_true);
  bool empty() const { return queue_.empty(); }

 private:
  struct Entry {
    double deliver_at;
    MocapSample sample;
  };
  std::deque<Entry> queue_;
};

}  // namespace dockbench
