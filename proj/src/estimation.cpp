#include "dockbench/estimation.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "dockbench/angles.hpp"

namespace dockbench {

namespace {

void symmetrize(Matrix7d& m) { m = 0.5 * (m + m.transpose()).eval(); }

void require_positive_definite(const Matrix7d& cov, const char* where) {
  Eigen::LLT<Matrix7d> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(where) + ": covariance not positive-definite");
}

}  // namespace

EstimatedState ekf_init(const MocapSample& z, const EkfParams& params) {
  EstimatedState est;
  est.x.head<3>() = z.position;
  est.x.segment<3>(3).setZero();
  est.x[6] = wrap_angle(z.yaw);
  est.cov = params.p0 * Matrix7d::Identity();
  est.stamp = z.stamp;
  return est;
}

EstimatedState ekf_predict(const EstimatedState& est, const ImuSample& imu,
                           const EkfParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ekf_predict: dt must be > 0");
  if (!imu.accel.allFinite() || !std::isfinite(imu.gyro_z))
    throw std::invalid_argument("ekf_predict: non-finite imu sample");

  EstimatedState next = est;
  next.x.head<3>() += est.velocity() * dt + 0.5 * dt * dt * imu.accel;
  next.x.segment<3>(3) += imu.accel * dt;
  next.x[6] = wrap_angle(est.x[6] + imu.gyro_z * dt);
  next.stamp = imu.stamp;

  Matrix7d F = Matrix7d::Identity();
  F.block<3, 3>(0, 3) = dt * Eigen::Matrix3d::Identity();

  // White-acceleration discretization per translational axis, white-rate for yaw.
  const double qa2 = params.q_accel * params.q_accel;
  const double qpp = qa2 * dt * dt * dt / 3.0;
  const double qpv = qa2 * dt * dt / 2.0;
  const double qvv = qa2 * dt;
  Matrix7d Q = Matrix7d::Zero();
  Q.block<3, 3>(0, 0) = qpp * Eigen::Matrix3d::Identity();
  Q.block<3, 3>(0, 3) = qpv * Eigen::Matrix3d::Identity();
  Q.block<3, 3>(3, 0) = qpv * Eigen::Matrix3d::Identity();
  Q.block<3, 3>(3, 3) = qvv * Eigen::Matrix3d::Identity();
  Q(6, 6) = params.q_yaw * params.q_yaw * dt;

  next.cov = F * est.cov * F.transpose() + Q;
  symmetrize(next.cov);
  if (!next.cov.allFinite() || !next.x.allFinite())
    throw NumericError("ekf_predict: non-finite state");
  require_positive_definite(next.cov, "ekf_predict");
  return next;
}

EstimatedState ekf_update_mocap(const EstimatedState& est, const MocapSample& z,
                                const EkfParams& params, UpdateInfo* info) {
  if (info) *info = UpdateInfo{};
  if (z.stamp < est.stamp) {
    if (info) info->rejected_stale = true;
    return est;
  }

  using Vector4d = Eigen::Vector4d;
  using Matrix4d = Eigen::Matrix4d;
  using Matrix47 = Eigen::Matrix<double, 4, 7>;
  using Matrix74 = Eigen::Matrix<double, 7, 4>;

  Matrix47 H = Matrix47::Zero();
  H.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
  H(3, 6) = 1.0;

  Matrix4d R = Matrix4d::Zero();
  R.diagonal() << params.r_pos * params.r_pos, params.r_pos * params.r_pos,
      params.r_pos * params.r_pos, params.r_yaw * params.r_yaw;

  Vector4d innovation;
  innovation.head<3>() = z.position - est.position();
  innovation[3] = angle_diff(z.yaw, est.yaw());

  const Matrix4d S = H * est.cov * H.transpose() + R;

  // Per-axis innovation gate.
  for (int i = 0; i < 4; ++i) {
    if (std::abs(innovation[i]) > params.gate_sigma * std::sqrt(S(i, i))) {
      if (info) info->rejected_gate = true;
      return est;
    }
  }

  Eigen::LLT<Matrix4d> llt(S);
  if (llt.info() != Eigen::Success)
    throw NumericError("ekf_update_mocap: singular innovation covariance");
  const Matrix74 K = llt.solve((H * est.cov).eval()).transpose();

  EstimatedState next = est;
  next.x += K * innovation;
  next.x[6] = wrap_angle(next.x[6]);
  next.stamp = z.stamp;

  const Matrix7d IKH = Matrix7d::Identity() - K * H;
  next.cov = IKH * est.cov * IKH.transpose() + K * R * K.transpose();
  symmetrize(next.cov);
  require_positive_definite(next.cov, "ekf_update_mocap");
  if (info) info->applied = true;
  return next;
}

double nees(const EstimatedState& est, const RigidState& truth) {
  Vector7d error;
  error.head<3>() = est.position() - truth.position;
  error.segment<3>(3) = est.velocity() - truth.velocity;
  error[6] = angle_diff(est.yaw(), truth.yaw);

  Eigen::LLT<Matrix7d> llt(est.cov);
  if (llt.info() != Eigen::Success)
    throw NumericError("nees: covariance not invertible");
  return error.dot(llt.solve(error));
}

}  // namespace dockbench
