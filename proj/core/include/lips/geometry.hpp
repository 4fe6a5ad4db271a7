#pragma once

#include <Eigen/Core>

namespace lips {

/// @brief Footplate orientation, roll about local x then pitch about global y.
struct AnklePose {
  double phi = 0.0;
  double theta = 0.0;

  Eigen::Vector2d vec() const { return {phi, theta}; }
  static AnklePose from_vec(const Eigen::Vector2d& chi) {
    return {chi[0], chi[1]};
  }
};

/// @brief First and second time derivatives of the footplate pose.
struct AnkleRates {
  Eigen::Vector2d chi_dot = Eigen::Vector2d::Zero();
  Eigen::Vector2d chi_ddot = Eigen::Vector2d::Zero();
};

/// @brief Link dimensions and travel limits of one parallel ankle.
///
/// Two motors sit above the ankle on the shank axis at heights a1 and a2,
/// offset laterally by r1 (side 1 at +y, side 2 at -y). Each motor swings a
/// crank of length l1 in its sagittal plane; a rod of length l2 connects the
/// crank tip to a hinge riveted to the footplate at p*_neutral.
struct AnkleGeometry {
  double l1 = 0.0;
  double l2 = 0.0;
  double r1 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  Eigen::Vector3d p1_neutral = Eigen::Vector3d::Zero();
  Eigen::Vector3d p2_neutral = Eigen::Vector3d::Zero();
  Eigen::Vector2d q_limits = {-1.5, 1.5};
  Eigen::Vector2d phi_limits = {-0.4, 0.4};
  Eigen::Vector2d theta_limits = {-0.7, 0.35};
};

/// @brief One-motor loop closure reduced to a*cos(q) + b*sin(q) = c.
struct TrigEquation {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// @brief Rotation of the footplate frame: pitch about y composed after roll
/// about x.
Eigen::Matrix3d footplate_rotation(const AnklePose& pose);

/// @brief Footplate hinge position for one side, expressed in the shank frame.
Eigen::Vector3d hinge_point(const AnkleGeometry& geom, int side,
                            const AnklePose& pose);

/// @brief Fixed motor shaft position for one side.
Eigen::Vector3d drive_base_point(const AnkleGeometry& geom, int side);

/// @brief Crank tip position for one side at motor angle q.
Eigen::Vector3d arm_tip(const AnkleGeometry& geom, int side, double q);

/// @brief Maps pose rates to the footplate angular velocity vector.
///
/// omega = M * chi_dot with columns for roll (carried through the pitch
/// rotation) and pitch (the fixed y axis).
Eigen::Matrix<double, 3, 2> angular_velocity_projection(const AnklePose& pose);

/// @brief Time derivative of angular_velocity_projection along chi_dot.
Eigen::Matrix<double, 3, 2> angular_velocity_projection_rate(
    const AnklePose& pose, const Eigen::Vector2d& chi_dot);

/// @brief Loop-closure coefficients for one side at the given pose.
TrigEquation loop_equation(const AnkleGeometry& geom, int side,
                           const AnklePose& pose);

/// @brief Closure feasibility margin a^2 + b^2 - c^2; negative means the rod
/// cannot reach.
double closure_margin(const TrigEquation& eq);

/// @brief Checks dimensions, limit ordering, and pose-box reachability.
///
/// Sweeps a 21x21 grid over the pose box and requires both loops to close at
/// every node. Throws InvalidGeometry or InfeasibleWorkspace.
void validate_geometry(const AnkleGeometry& geom);

/// @brief Rod length that closes the given side exactly at the neutral pose
/// with the crank horizontal.
double auto_rod_length(const AnkleGeometry& geom, int side);

/// @brief Desk-scale build used by the tools and tests when no geometry file
/// is given.
AnkleGeometry reference_fixture();

}  // namespace lips
