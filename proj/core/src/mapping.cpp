#include "lips/mapping.hpp"

#include <cmath>

#include "lips/errors.hpp"

namespace lips {

namespace {

constexpr double kSingularDeterminant = 1e-8;

}  // namespace

Eigen::Vector2d serial_torque_from_parallel(const Eigen::Matrix2d& j,
                                            const Eigen::Vector2d& tau_p) {
  return j.transpose() * tau_p;
}

Eigen::Vector2d parallel_torque_from_serial(const Eigen::Matrix2d& j,
                                            const Eigen::Vector2d& tau_s) {
  const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
  if (std::abs(det) <= kSingularDeterminant) {
    throw SingularConfiguration(
        "velocity map is not invertible: ankle torque has no motor-torque "
        "realization");
  }
  return {(j(1, 1) * tau_s[0] - j(1, 0) * tau_s[1]) / det,
          (j(0, 0) * tau_s[1] - j(0, 1) * tau_s[0]) / det};
}

MotorState state_serial_to_parallel(const AnkleGeometry& geom,
                                    const AnklePose& pose,
                                    const AnkleRates& rates) {
  MotorState out;
  out.q = ik_position(geom, pose).q;
  const Eigen::Matrix2d j = jacobian(geom, pose, out.q);
  out.q_dot = ik_velocity(j, rates.chi_dot);
  const Eigen::Matrix2d j_dot =
      jacobian_dot(geom, pose, rates, out.q, out.q_dot);
  out.q_ddot = ik_acceleration(j, j_dot, rates);
  return out;
}

SerialState state_parallel_to_serial(const AnkleGeometry& geom,
                                     const Eigen::Vector2d& q,
                                     const Eigen::Vector2d& q_dot,
                                     const AnklePose& guess) {
  SerialState out;
  out.pose = fk_position(geom, q, guess).pose;
  const Eigen::Matrix2d j = jacobian(geom, out.pose, q);
  const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
  if (std::abs(det) <= kSingularDeterminant) {
    throw SingularConfiguration(
        "velocity map is not invertible: motor rates do not determine pose "
        "rates");
  }
  out.chi_dot = {(j(1, 1) * q_dot[0] - j(0, 1) * q_dot[1]) / det,
                 (j(0, 0) * q_dot[1] - j(1, 0) * q_dot[0]) / det};
  return out;
}

}  // namespace lips
