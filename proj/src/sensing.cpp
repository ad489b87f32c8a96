#include "dockbench/sensing.hpp"

#include "dockbench/angles.hpp"

namespace dockbench {

double host_timestamp(double t_true, const SensorConfig& cfg) {
  return t_true * (1.0 + cfg.clock_drift) + cfg.clock_offset;
}

std::optional<MocapSample> sample_mocap(const RigidState& truth, const SensorConfig& cfg,
                                        double t_true, Rng& rng) {
  if (draw_uniform(rng) < cfg.dropout_prob) return std::nullopt;

  MocapSample s;
  for (int i = 0; i < 3; ++i)
    s.position[i] = truth.position[i] + cfg.mocap_pos_noise * draw_normal(rng);
  s.yaw = wrap_angle(truth.yaw + cfg.mocap_yaw_noise * draw_normal(rng));
  s.stamp = host_timestamp(t_true, cfg);
  return s;
}

ImuSample sample_imu(const RigidState& truth, const Eigen::Vector3d& applied_accel,
                     const SensorConfig& cfg, double t_true, Rng& rng) {
  ImuSample s;
  for (int i = 0; i < 3; ++i)
    s.accel[i] = applied_accel[i] + cfg.accel_noise * draw_normal(rng);
  s.gyro_z = truth.yaw_rate + cfg.gyro_bias + cfg.gyro_noise * draw_normal(rng);
  s.stamp = host_timestamp(t_true, cfg);
  return s;
}

void MocapDelayQueue::push(const MocapSample& sample, double t_true,
                           const SensorConfig& cfg) {
  queue_.push_back({t_true + cfg.mocap_latency, sample});
}

std::vector<MocapSample> MocapDelayQueue::pop_due(double t_true) {
  std::vector<MocapSample> due;
  while (!queue_.empty() && queue_.front().deliver_at <= t_true + 1e-12) {
    due.push_back(queue_.front().sample);
    queue_.pop_front();
  }
  return due;
}

}  // namespace dockbench
