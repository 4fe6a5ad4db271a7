#include "lips/control.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "lips/errors.hpp"

namespace lips {

namespace {

Eigen::Vector2d clamp_torque(Eigen::Vector2d tau, double limit) {
  tau[0] = std::clamp(tau[0], -limit, limit);
  tau[1] = std::clamp(tau[1], -limit, limit);
  return tau;
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::LiPS:
      return "lips";
    case Method::S2PTorque:
      return "s2p-torque";
    case Method::S2PPosition:
      return "s2p-position";
    case Method::Passive:
      return "passive";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "lips") return Method::LiPS;
  if (name == "s2p-torque") return Method::S2PTorque;
  if (name == "s2p-position") return Method::S2PPosition;
  if (name == "passive") return Method::Passive;
  return std::nullopt;
}

AnklePose reference_pose(const ReferenceSpec& spec, double t) {
  AnklePose pose;
  for (int i = 0; i < 2; ++i) {
    double cycles = spec.frequency[i] * t;
    if (spec.kind == ReferenceSpec::Kind::Chirp) {
      cycles += 0.5 * spec.chirp_rate * t * t;
    }
    const double value =
        spec.amplitude[i] * std::sin(2.0 * M_PI * cycles + spec.phase[i]);
    (i == 0 ? pose.phi : pose.theta) = value;
  }
  return pose;
}

ScriptedPolicy::ScriptedPolicy(AnkleGeometry geom, ReferenceSpec spec)
    : geom_(std::move(geom)), spec_(spec) {}

Eigen::Vector2d ScriptedPolicy::act(const Observation& obs, double t) {
  (void)obs;
  return scripted_policy(geom_, spec_, t);
}

AnklePose ScriptedPolicy::reference(double t) const {
  return reference_pose(spec_, t);
}

Eigen::Vector2d scripted_policy(const AnkleGeometry& geom,
                                const ReferenceSpec& spec, double t) {
  const AnklePose chi_ref = reference_pose(spec, t);
  Eigen::Vector2d a = ik_position(geom, chi_ref).q;
  a[0] = std::clamp(a[0], geom.q_limits[0], geom.q_limits[1]);
  a[1] = std::clamp(a[1], geom.q_limits[0], geom.q_limits[1]);
  return a;
}

Eigen::Vector2d pd_torque(const PdGains& gains, const Eigen::Vector2d& q_des,
                          const Eigen::Vector2d& q_dot_des,
                          const Eigen::Vector2d& q_meas,
                          const Eigen::Vector2d& q_dot_meas) {
  const Eigen::Vector2d tau =
      gains.kp.cwiseProduct(q_des - q_meas) +
      gains.kd.cwiseProduct(q_dot_des - q_dot_meas);
  return clamp_torque(tau, gains.tau_limit);
}

LipsSimStep lips_sim_step(Policy& policy, const AnkleGeometry& geom,
                          const AnklePose& pose, const Eigen::Vector2d& chi_dot,
                          double t, const PdGains& gains,
                          const Eigen::Vector2d& last_action) {
  LipsSimStep step;
  step.io.s_t = Observation{pose, chi_dot, policy.reference(t), last_action};
  step.io.a_t = policy.act(step.io.s_t, t);

  step.motor.q = ik_position(geom, pose).q;
  const Eigen::Matrix2d j = jacobian(geom, pose, step.motor.q);
  step.motor.q_dot = ik_velocity(j, chi_dot);

  step.tau_p = pd_torque(gains, step.io.a_t, Eigen::Vector2d::Zero(),
                         step.motor.q, step.motor.q_dot);
  step.tau_s = serial_torque_from_parallel(j, step.tau_p);

  const Eigen::Vector2d tracking_error =
      step.io.s_t.reference.vec() - pose.vec();
  step.io.r_t =
      -(tracking_error.squaredNorm() + 0.01 * step.tau_p.squaredNorm());
  return step;
}

Eigen::Vector2d lips_deploy_step(Policy& policy, const Eigen::Vector2d& q_meas,
                                 const Eigen::Vector2d& q_dot_meas, double t,
                                 const PdGains& gains,
                                 const Eigen::Vector2d& last_action,
                                 SolveCounter& solves) {
  (void)solves;
  Observation obs;
  obs.reference = policy.reference(t);
  obs.last_action = last_action;
  const Eigen::Vector2d a_t = policy.act(obs, t);
  return pd_torque(gains, a_t, Eigen::Vector2d::Zero(), q_meas, q_dot_meas);
}

Eigen::Vector2d s2p_torque_step(const SerialAnkleCmd& serial_cmd,
                                const AnkleGeometry& geom,
                                const Eigen::Vector2d& q_meas,
                                [[maybe_unused]] const Eigen::Vector2d&
                                    q_dot_meas,
                                [[maybe_unused]] const PdGains& gains,
                                SolveCounter& solves) {
  solves.count += 1;
  const AnklePose chi_est = fk_position(geom, q_meas).pose;
  solves.count += 1;
  const Eigen::Matrix2d j = jacobian(geom, chi_est, q_meas);
  return parallel_torque_from_serial(j, serial_cmd.tau_s);
}

Eigen::Vector2d s2p_position_step(const SerialAnkleCmd& serial_cmd,
                                  const AnkleGeometry& geom,
                                  const Eigen::Vector2d& q_meas,
                                  const Eigen::Vector2d& q_dot_meas,
                                  const PdGains& gains,
                                  std::optional<Eigen::Vector2d>& prev_q_des,
                                  SolveCounter& solves) {
  Eigen::Vector2d q_des = prev_q_des.value_or(Eigen::Vector2d::Zero());
  if (serial_cmd.chi_des) {
    solves.count += 1;
    try {
      q_des = ik_position(geom, *serial_cmd.chi_des).q;
      prev_q_des = q_des;
    } catch (const WorkspaceError&) {
    } catch (const LimitError&) {
    }
  }

  const Eigen::Vector2d tau =
      pd_torque(gains, q_des, Eigen::Vector2d::Zero(), q_meas, q_dot_meas);
  const double sign = tau[0] + tau[1] >= 0.0 ? 1.0 : -1.0;
  const double mean_magnitude =
      0.5 * (std::abs(tau[0]) + std::abs(tau[1]));
  return {sign * mean_magnitude, sign * mean_magnitude};
}

Eigen::Vector2d passive_step(const Eigen::Vector2d& q_dot_meas,
                             const PdGains& gains) {
  return clamp_torque(-gains.kd.cwiseProduct(q_dot_meas), gains.tau_limit);
}

}  // namespace lips
