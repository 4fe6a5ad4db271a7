#pragma once

#include <optional>

#include <Eigen/Core>

#include "lips/geometry.hpp"
#include "lips/kinematics.hpp"

namespace lips {

/// @brief Command expressed in ankle (serial) space.
struct SerialAnkleCmd {
  Eigen::Vector2d tau_s = Eigen::Vector2d::Zero();
  std::optional<AnklePose> chi_des;
  std::optional<Eigen::Vector2d> chi_dot_des;
};

/// @brief Command expressed in motor (parallel) space.
struct ParallelAnkleCmd {
  Eigen::Vector2d tau_p = Eigen::Vector2d::Zero();
  std::optional<Eigen::Vector2d> q_des;
  std::optional<Eigen::Vector2d> q_dot_des;
};

/// @brief Ankle pose and pose rate recovered from motor measurements.
struct SerialState {
  AnklePose pose;
  Eigen::Vector2d chi_dot = Eigen::Vector2d::Zero();
};

/// @brief Ankle-space torque produced by motor torques: tau_s = J^T * tau_p.
///
/// Power balance holds by construction: tau_s . chi_dot == tau_p . (J chi_dot).
Eigen::Vector2d serial_torque_from_parallel(const Eigen::Matrix2d& j,
                                            const Eigen::Vector2d& tau_p);

/// @brief Motor torques that reproduce an ankle-space torque:
/// tau_p = J^-T * tau_s.
///
/// Uses the closed-form 2x2 inverse; throws SingularConfiguration when
/// |det J| <= 1e-8.
Eigen::Vector2d parallel_torque_from_serial(const Eigen::Matrix2d& j,
                                            const Eigen::Vector2d& tau_s);

/// @brief Full motor-space state for a commanded ankle motion: q from the
/// position solve, q_dot = J chi_dot, q_ddot = J chi_ddot + J_dot chi_dot.
MotorState state_serial_to_parallel(const AnkleGeometry& geom,
                                    const AnklePose& pose,
                                    const AnkleRates& rates);

/// @brief Ankle-space state recovered from motor measurements: pose from the
/// iterative solve, chi_dot = J^-1 q_dot.
SerialState state_parallel_to_serial(const AnkleGeometry& geom,
                                     const Eigen::Vector2d& q,
                                     const Eigen::Vector2d& q_dot,
                                     const AnklePose& guess = AnklePose{});

}  // namespace lips
