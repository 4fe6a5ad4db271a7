#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

#include "lips/geometry.hpp"

namespace lips {

/// @brief Motor-space state of the two cranks.
struct MotorState {
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  Eigen::Vector2d q_dot = Eigen::Vector2d::Zero();
  Eigen::Vector2d q_ddot = Eigen::Vector2d::Zero();
};

/// @brief Which of the two closure roots a solution sits on.
enum class Branch { Plus, Minus };

/// @brief Motor angles that close both loops at a requested pose.
struct IkSolution {
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  std::array<Branch, 2> branch = {Branch::Minus, Branch::Minus};
  double residual = 0.0;
};

/// @brief Velocity map and its time derivative, rows per motor.
struct JacobianPair {
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d j_dot = Eigen::Matrix2d::Zero();
};

/// @brief Pose-rate sensitivities of the hinge and crank tip of one side.
///
/// Each matrix maps chi_dot to a point velocity: r_p for the hinge, r_c for
/// the crank tip, with r_p_dot and r_c_dot their time derivatives.
struct PointRateMatrices {
  Eigen::Matrix<double, 3, 2> r_p = Eigen::Matrix<double, 3, 2>::Zero();
  Eigen::Matrix<double, 3, 2> r_p_dot = Eigen::Matrix<double, 3, 2>::Zero();
  Eigen::Matrix<double, 3, 2> r_c = Eigen::Matrix<double, 3, 2>::Zero();
  Eigen::Matrix<double, 3, 2> r_c_dot = Eigen::Matrix<double, 3, 2>::Zero();
};

/// @brief Result of the iterative pose solve.
struct FkResult {
  AnklePose pose;
  int iterations = 0;
  double residual = 0.0;
};

/// @brief Both roots of a*cos(q) + b*sin(q) = c, wrapped to (-pi, pi].
///
/// Returned as {minus branch, plus branch}. Throws WorkspaceError when the
/// equation has no real root.
std::array<double, 2> solve_trig(const TrigEquation& eq);

/// @brief Solves both loop closures for the motor angles at a pose.
///
/// Root selection keeps only roots inside q_limits, then picks the one
/// nearest prev->q when a previous state is given, nearest zero otherwise.
/// Throws WorkspaceError when a loop cannot close and LimitError when no
/// root lies inside q_limits.
IkSolution ik_position(const AnkleGeometry& geom, const AnklePose& pose,
                       const std::optional<MotorState>& prev = std::nullopt);

/// @brief Hinge and crank-tip rate maps for one side.
PointRateMatrices point_rate_matrices(const AnkleGeometry& geom, int side,
                                      const AnklePose& pose,
                                      const AnkleRates& rates,
                                      const Eigen::Vector2d& q,
                                      const Eigen::Vector2d& q_dot);

/// @brief Velocity map from pose rates to motor rates at a closed
/// configuration.
///
/// Throws SingularConfiguration when a rod is aligned with its crank and the
/// transmission scalar vanishes.
Eigen::Matrix2d jacobian(const AnkleGeometry& geom, const AnklePose& pose,
                         const Eigen::Vector2d& q);

/// @brief Motor rates q_dot = J * chi_dot.
Eigen::Vector2d ik_velocity(const Eigen::Matrix2d& j,
                            const Eigen::Vector2d& chi_dot);

/// @brief Time derivative of the velocity map along the given motion.
Eigen::Matrix2d jacobian_dot(const AnkleGeometry& geom, const AnklePose& pose,
                             const AnkleRates& rates, const Eigen::Vector2d& q,
                             const Eigen::Vector2d& q_dot);

/// @brief Motor accelerations q_ddot = J * chi_ddot + J_dot * chi_dot.
Eigen::Vector2d ik_acceleration(const Eigen::Matrix2d& j,
                                const Eigen::Matrix2d& j_dot,
                                const AnkleRates& rates);

/// @brief Velocity map and its derivative in one call.
JacobianPair jacobian_pair(const AnkleGeometry& geom, const AnklePose& pose,
                           const AnkleRates& rates, const Eigen::Vector2d& q,
                           const Eigen::Vector2d& q_dot);

/// @brief Recovers the pose from motor angles by Newton iteration on the two
/// squared rod-length residuals.
///
/// Throws NoConvergence with the best iterate after 50 iterations.
FkResult fk_position(const AnkleGeometry& geom, const Eigen::Vector2d& q,
                     const AnklePose& guess = AnklePose{});

}  // namespace lips
