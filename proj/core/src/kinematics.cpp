#include "lips/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lips/errors.hpp"

namespace lips {

namespace {

constexpr double kSingularTransmission = 1e-10;
constexpr int kFkMaxIterations = 50;
constexpr double kFkTolerance = 1e-12;

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

double wrap_angle(double x) { return std::remainder(x, 2.0 * M_PI); }

/// Everything the velocity-level formulas need for one side.
struct SideTerms {
  Eigen::Vector3d p;
  Eigen::Vector3d cp;
  Eigen::Vector3d bc;
  double d = 0.0;
  Eigen::Matrix<double, 3, 2> r_p;
  Eigen::RowVector2d j_row;
};

SideTerms side_terms(const AnkleGeometry& geom, int side, const AnklePose& pose,
                     double q) {
  SideTerms t;
  t.p = hinge_point(geom, side, pose);
  const Eigen::Vector3d c = arm_tip(geom, side, q);
  t.cp = t.p - c;
  t.bc = c - drive_base_point(geom, side);
  t.d = t.bc.z() * t.cp.x() - t.bc.x() * t.cp.z();
  if (std::abs(t.d) <= kSingularTransmission) {
    std::ostringstream msg;
    msg << "transmission scalar vanished on side " << side
        << " (rod aligned with crank)";
    throw SingularConfiguration(msg.str());
  }
  t.r_p = -skew(t.p) * angular_velocity_projection(pose);
  t.j_row = t.cp.transpose() * t.r_p / t.d;
  return t;
}

/// Extends SideTerms with the time-derivative quantities.
struct SideRateTerms {
  SideTerms base;
  Eigen::Matrix<double, 3, 2> r_p_dot;
  Eigen::RowVector2d j_dot_row;
  Eigen::Matrix<double, 3, 2> r_c;
  Eigen::Matrix<double, 3, 2> r_c_dot;
};

SideRateTerms side_rate_terms(const AnkleGeometry& geom, int side,
                              const AnklePose& pose, const AnkleRates& rates,
                              double q, double q_dot) {
  SideRateTerms t;
  t.base = side_terms(geom, side, pose, q);
  const Eigen::Vector2d& chi_dot = rates.chi_dot;

  const Eigen::Vector3d p_dot = t.base.r_p * chi_dot;
  t.r_p_dot = -skew(t.base.p) * angular_velocity_projection_rate(pose, chi_dot) -
              skew(p_dot) * angular_velocity_projection(pose);

  const Eigen::Vector3d u{t.base.bc.z(), 0.0, -t.base.bc.x()};
  t.r_c = u * t.base.j_row;

  const Eigen::Matrix<double, 3, 2> rel = t.base.r_p - t.r_c;
  const Eigen::Vector3d cp_dot = rel * chi_dot;
  t.j_dot_row = (t.base.cp.transpose() * t.r_p_dot +
                 q_dot * t.base.cp.dot(t.base.bc) * t.base.j_row +
                 cp_dot.transpose() * rel) /
                t.base.d;

  t.r_c_dot = u * t.j_dot_row - q_dot * t.base.bc * t.base.j_row;
  return t;
}

}  // namespace

std::array<double, 2> solve_trig(const TrigEquation& eq) {
  const double r = std::hypot(eq.a, eq.b);
  if (r < 1e-15) {
    throw WorkspaceError("loop closure is degenerate: crank has no leverage");
  }
  if (closure_margin(eq) < 0.0) {
    throw WorkspaceError("loop closure has no real root: rod cannot reach");
  }
  const double delta = std::atan2(eq.b, eq.a);
  const double h = std::acos(std::clamp(eq.c / r, -1.0, 1.0));
  return {wrap_angle(delta - h), wrap_angle(delta + h)};
}

IkSolution ik_position(const AnkleGeometry& geom, const AnklePose& pose,
                       const std::optional<MotorState>& prev) {
  IkSolution sol;
  sol.residual = 0.0;
  for (int side = 1; side <= 2; ++side) {
    const TrigEquation eq = loop_equation(geom, side, pose);
    if (closure_margin(eq) < 0.0) {
      std::ostringstream msg;
      msg << "pose (phi=" << pose.phi << ", theta=" << pose.theta
          << ") is outside the reachable workspace: side " << side
          << " rod cannot close";
      throw WorkspaceError(msg.str());
    }
    const std::array<double, 2> roots = solve_trig(eq);

    const double target = prev ? prev->q[side - 1] : 0.0;
    int chosen = -1;
    for (int k = 0; k < 2; ++k) {
      if (roots[k] < geom.q_limits[0] || roots[k] > geom.q_limits[1]) {
        continue;
      }
      if (chosen < 0 ||
          std::abs(roots[k] - target) < std::abs(roots[chosen] - target)) {
        chosen = k;
      }
    }
    if (chosen < 0) {
      std::ostringstream msg;
      msg << "side " << side << " roots " << roots[0] << " and " << roots[1]
          << " both violate q_limits [" << geom.q_limits[0] << ", "
          << geom.q_limits[1] << "]";
      throw LimitError(msg.str());
    }

    const double q = roots[chosen];
    sol.q[side - 1] = q;
    sol.branch[side - 1] = chosen == 0 ? Branch::Minus : Branch::Plus;

    const double rod =
        (hinge_point(geom, side, pose) - arm_tip(geom, side, q)).norm();
    sol.residual = std::max(sol.residual, std::abs(rod - geom.l2));
  }
  return sol;
}

PointRateMatrices point_rate_matrices(const AnkleGeometry& geom, int side,
                                      const AnklePose& pose,
                                      const AnkleRates& rates,
                                      const Eigen::Vector2d& q,
                                      const Eigen::Vector2d& q_dot) {
  const SideRateTerms t =
      side_rate_terms(geom, side, pose, rates, q[side - 1], q_dot[side - 1]);
  PointRateMatrices out;
  out.r_p = t.base.r_p;
  out.r_p_dot = t.r_p_dot;
  out.r_c = t.r_c;
  out.r_c_dot = t.r_c_dot;
  return out;
}

Eigen::Matrix2d jacobian(const AnkleGeometry& geom, const AnklePose& pose,
                         const Eigen::Vector2d& q) {
  Eigen::Matrix2d j;
  for (int side = 1; side <= 2; ++side) {
    j.row(side - 1) = side_terms(geom, side, pose, q[side - 1]).j_row;
  }
  return j;
}

Eigen::Vector2d ik_velocity(const Eigen::Matrix2d& j,
                            const Eigen::Vector2d& chi_dot) {
  return j * chi_dot;
}

Eigen::Matrix2d jacobian_dot(const AnkleGeometry& geom, const AnklePose& pose,
                             const AnkleRates& rates, const Eigen::Vector2d& q,
                             const Eigen::Vector2d& q_dot) {
  Eigen::Matrix2d j_dot;
  for (int side = 1; side <= 2; ++side) {
    j_dot.row(side - 1) =
        side_rate_terms(geom, side, pose, rates, q[side - 1], q_dot[side - 1])
            .j_dot_row;
  }
  return j_dot;
}

Eigen::Vector2d ik_acceleration(const Eigen::Matrix2d& j,
                                const Eigen::Matrix2d& j_dot,
                                const AnkleRates& rates) {
  return j * rates.chi_ddot + j_dot * rates.chi_dot;
}

JacobianPair jacobian_pair(const AnkleGeometry& geom, const AnklePose& pose,
                           const AnkleRates& rates, const Eigen::Vector2d& q,
                           const Eigen::Vector2d& q_dot) {
  JacobianPair pair;
  for (int side = 1; side <= 2; ++side) {
    const SideRateTerms t =
        side_rate_terms(geom, side, pose, rates, q[side - 1], q_dot[side - 1]);
    pair.j.row(side - 1) = t.base.j_row;
    pair.j_dot.row(side - 1) = t.j_dot_row;
  }
  return pair;
}

FkResult fk_position(const AnkleGeometry& geom, const Eigen::Vector2d& q,
                     const AnklePose& guess) {
  Eigen::Vector2d chi = guess.vec();
  std::array<Eigen::Vector3d, 2> tips;
  for (int side = 1; side <= 2; ++side) {
    tips[side - 1] = arm_tip(geom, side, q[side - 1]);
  }

  Eigen::Vector2d best_chi = chi;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter <= kFkMaxIterations; ++iter) {
    const AnklePose pose = AnklePose::from_vec(chi);
    Eigen::Vector2d g;
    Eigen::Matrix2d jg;
    double rod_residual = 0.0;
    for (int side = 1; side <= 2; ++side) {
      const Eigen::Vector3d p = hinge_point(geom, side, pose);
      const Eigen::Vector3d cp = p - tips[side - 1];
      g[side - 1] = cp.squaredNorm() - geom.l2 * geom.l2;
      const Eigen::Matrix<double, 3, 2> r_p =
          -skew(p) * angular_velocity_projection(pose);
      jg.row(side - 1) = 2.0 * cp.transpose() * r_p;
      rod_residual = std::max(rod_residual, std::abs(cp.norm() - geom.l2));
    }

    if (rod_residual < best_residual) {
      best_residual = rod_residual;
      best_chi = chi;
    }
    if (rod_residual < kFkTolerance) {
      return {pose, iter, rod_residual};
    }
    if (iter == kFkMaxIterations) {
      break;
    }

    const double det = jg(0, 0) * jg(1, 1) - jg(0, 1) * jg(1, 0);
    if (std::abs(det) < 1e-14) {
      throw NoConvergence("pose solve hit a singular Newton step", best_chi,
                          best_residual);
    }
    chi[0] += (-jg(1, 1) * g[0] + jg(0, 1) * g[1]) / det;
    chi[1] += (jg(1, 0) * g[0] - jg(0, 0) * g[1]) / det;
  }

  throw NoConvergence("pose solve did not converge within 50 iterations",
                      best_chi, best_residual);
}

}  // namespace lips
