#include "lips/geometry.hpp"

#include <cmath>
#include <sstream>

#include "lips/errors.hpp"

namespace lips {

namespace {

double side_base_y(const AnkleGeometry& geom, int side) {
  return side == 1 ? geom.r1 : -geom.r1;
}

double side_base_z(const AnkleGeometry& geom, int side) {
  return side == 1 ? geom.a1 : geom.a2;
}

void require_side(int side) {
  if (side != 1 && side != 2) {
    std::ostringstream msg;
    msg << "side must be 1 or 2, got " << side;
    throw InvalidGeometry(msg.str());
  }
}

bool ordered(const Eigen::Vector2d& limits) {
  return std::isfinite(limits[0]) && std::isfinite(limits[1]) &&
         limits[0] < limits[1];
}

}  // namespace

Eigen::Matrix3d footplate_rotation(const AnklePose& pose) {
  const double cp = std::cos(pose.phi);
  const double sp = std::sin(pose.phi);
  const double ct = std::cos(pose.theta);
  const double st = std::sin(pose.theta);
  Eigen::Matrix3d roll;
  roll << 1, 0, 0, 0, cp, -sp, 0, sp, cp;
  Eigen::Matrix3d pitch;
  pitch << ct, 0, st, 0, 1, 0, -st, 0, ct;
  return pitch * roll;
}

Eigen::Vector3d hinge_point(const AnkleGeometry& geom, int side,
                            const AnklePose& pose) {
  require_side(side);
  const Eigen::Vector3d& neutral =
      side == 1 ? geom.p1_neutral : geom.p2_neutral;
  return footplate_rotation(pose) * neutral;
}

Eigen::Vector3d drive_base_point(const AnkleGeometry& geom, int side) {
  require_side(side);
  return {0.0, side_base_y(geom, side), side_base_z(geom, side)};
}

Eigen::Vector3d arm_tip(const AnkleGeometry& geom, int side, double q) {
  require_side(side);
  return {geom.l1 * std::cos(q), side_base_y(geom, side),
          side_base_z(geom, side) - geom.l1 * std::sin(q)};
}

Eigen::Matrix<double, 3, 2> angular_velocity_projection(const AnklePose& pose) {
  const double ct = std::cos(pose.theta);
  const double st = std::sin(pose.theta);
  Eigen::Matrix<double, 3, 2> m;
  m << ct, 0, 0, 1, -st, 0;
  return m;
}

Eigen::Matrix<double, 3, 2> angular_velocity_projection_rate(
    const AnklePose& pose, const Eigen::Vector2d& chi_dot) {
  const double ct = std::cos(pose.theta);
  const double st = std::sin(pose.theta);
  const double theta_dot = chi_dot[1];
  Eigen::Matrix<double, 3, 2> m;
  m << -st * theta_dot, 0, 0, 0, -ct * theta_dot, 0;
  return m;
}

TrigEquation loop_equation(const AnkleGeometry& geom, int side,
                           const AnklePose& pose) {
  const Eigen::Vector3d p = hinge_point(geom, side, pose);
  const double dy = p.y() - side_base_y(geom, side);
  const double dz = p.z() - side_base_z(geom, side);
  TrigEquation eq;
  eq.a = 2.0 * p.x() * geom.l1;
  eq.b = -2.0 * dz * geom.l1;
  eq.c = p.x() * p.x() + dy * dy + dz * dz + geom.l1 * geom.l1 -
         geom.l2 * geom.l2;
  return eq;
}

double closure_margin(const TrigEquation& eq) {
  return eq.a * eq.a + eq.b * eq.b - eq.c * eq.c;
}

void validate_geometry(const AnkleGeometry& geom) {
  if (!(std::isfinite(geom.l1) && geom.l1 > 0.0)) {
    throw InvalidGeometry("crank length l1 must be positive and finite");
  }
  if (!(std::isfinite(geom.l2) && geom.l2 > 0.0)) {
    throw InvalidGeometry("rod length l2 must be positive and finite");
  }
  if (!(std::isfinite(geom.r1) && geom.r1 > 0.0)) {
    throw InvalidGeometry("lateral offset r1 must be positive and finite");
  }
  if (!(std::isfinite(geom.a1) && geom.a1 > 0.0) ||
      !(std::isfinite(geom.a2) && geom.a2 > 0.0)) {
    throw InvalidGeometry("motor heights a1 and a2 must be positive and finite");
  }
  if (!geom.p1_neutral.allFinite() || !geom.p2_neutral.allFinite()) {
    throw InvalidGeometry("hinge positions must be finite");
  }
  if (!ordered(geom.q_limits)) {
    throw InvalidGeometry("q_limits must be an ordered finite interval");
  }
  if (!ordered(geom.phi_limits) || !ordered(geom.theta_limits)) {
    throw InvalidGeometry("pose limits must be ordered finite intervals");
  }

  constexpr int kGridN = 21;
  for (int i = 0; i < kGridN; ++i) {
    const double phi = geom.phi_limits[0] +
                       (geom.phi_limits[1] - geom.phi_limits[0]) * i /
                           (kGridN - 1);
    for (int j = 0; j < kGridN; ++j) {
      const double theta = geom.theta_limits[0] +
                           (geom.theta_limits[1] - geom.theta_limits[0]) * j /
                               (kGridN - 1);
      const AnklePose pose{phi, theta};
      for (int side = 1; side <= 2; ++side) {
        if (closure_margin(loop_equation(geom, side, pose)) < 0.0) {
          std::ostringstream msg;
          msg << "declared pose box is not reachable: side " << side
              << " cannot close at phi=" << phi << " theta=" << theta;
          throw InfeasibleWorkspace(msg.str());
        }
      }
    }
  }
}

double auto_rod_length(const AnkleGeometry& geom, int side) {
  const Eigen::Vector3d p = hinge_point(geom, side, AnklePose{});
  return (p - arm_tip(geom, side, 0.0)).norm();
}

AnkleGeometry reference_fixture() {
  AnkleGeometry geom;
  geom.l1 = 0.05;
  geom.r1 = 0.045;
  geom.a1 = 0.30;
  geom.a2 = 0.30;
  geom.p1_neutral = {0.055, 0.045, 0.04};
  geom.p2_neutral = {0.055, -0.045, 0.04};
  geom.q_limits = {-1.5, 1.5};
  geom.phi_limits = {-0.4, 0.4};
  geom.theta_limits = {-0.7, 0.35};
  geom.l2 = auto_rod_length(geom, 1);
  return geom;
}

}  // namespace lips
