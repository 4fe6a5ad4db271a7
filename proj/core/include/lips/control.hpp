#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "lips/geometry.hpp"
#include "lips/kinematics.hpp"
#include "lips/mapping.hpp"

namespace lips {

/// @brief Per-motor PD gains with a symmetric torque clamp.
struct PdGains {
  Eigen::Vector2d kp = {30.0, 30.0};
  Eigen::Vector2d kd = {1.5, 1.5};
  double tau_limit = 60.0;
};

/// @brief What a policy sees at one control tick.
struct Observation {
  AnklePose pose;
  Eigen::Vector2d chi_dot = Eigen::Vector2d::Zero();
  AnklePose reference;
  Eigen::Vector2d last_action = Eigen::Vector2d::Zero();
};

/// @brief One logged policy interaction: observation, action, reward, and the
/// observation after the plant advanced.
struct PolicyIO {
  Observation s_t;
  Eigen::Vector2d a_t = Eigen::Vector2d::Zero();
  double r_t = 0.0;
  Observation s_next;
};

/// @brief Deployment strategy under comparison.
enum class Method { LiPS, S2PTorque, S2PPosition, Passive };

/// @brief Canonical lower-case name used by the tools ("lips", "s2p-torque",
/// "s2p-position", "passive").
std::string method_name(Method method);

/// @brief Parses a canonical method name; empty optional when unknown.
std::optional<Method> parse_method(const std::string& name);

/// @brief Ankle-space reference trajectory description.
struct ReferenceSpec {
  enum class Kind { Sinusoid, Chirp };
  Kind kind = Kind::Sinusoid;
  Eigen::Vector2d amplitude = {0.05, 0.2};
  Eigen::Vector2d frequency = {0.3, 0.5};
  Eigen::Vector2d phase = Eigen::Vector2d::Zero();
  double chirp_rate = 0.0;
};

/// @brief Reference pose at time t.
AnklePose reference_pose(const ReferenceSpec& spec, double t);

/// @brief Counts analytic kinematic solves (position, velocity-map, or pose
/// recovery evaluations) charged to a deployment method.
struct SolveCounter {
  long long count = 0;
};

/// @brief Action source for the control loops.
class Policy {
 public:
  virtual ~Policy() = default;

  /// @brief Desired motor positions for the next control period.
  virtual Eigen::Vector2d act(const Observation& obs, double t) = 0;

  /// @brief Ankle-space reference this policy is tracking at time t.
  virtual AnklePose reference(double t) const = 0;
};

/// @brief Deterministic stand-in for a trained policy: converts the scripted
/// ankle-space reference into motor position targets.
class ScriptedPolicy : public Policy {
 public:
  ScriptedPolicy(AnkleGeometry geom, ReferenceSpec spec);

  Eigen::Vector2d act(const Observation& obs, double t) override;
  AnklePose reference(double t) const override;

 private:
  AnkleGeometry geom_;
  ReferenceSpec spec_;
};

/// @brief Motor position targets from the scripted ankle-space reference.
///
/// Stands in for policy inference; its internal position solve is not charged
/// to any deployment solve counter.
Eigen::Vector2d scripted_policy(const AnkleGeometry& geom,
                                const ReferenceSpec& spec, double t);

/// @brief Clamped per-motor PD law
/// tau = kp (q_des - q_meas) + kd (q_dot_des - q_dot_meas).
Eigen::Vector2d pd_torque(const PdGains& gains, const Eigen::Vector2d& q_des,
                          const Eigen::Vector2d& q_dot_des,
                          const Eigen::Vector2d& q_meas,
                          const Eigen::Vector2d& q_dot_meas);

/// @brief Result of one training-time control tick.
struct LipsSimStep {
  Eigen::Vector2d tau_s = Eigen::Vector2d::Zero();
  Eigen::Vector2d tau_p = Eigen::Vector2d::Zero();
  MotorState motor;
  PolicyIO io;
};

/// @brief One training-loop tick: observe the ankle state, query the policy,
/// run the motor-space PD against the mapped motor state, and lift the result
/// to an ankle torque through the velocity map.
///
/// The returned record has s_next unfilled; the episode runner completes it
/// after advancing the plant.
LipsSimStep lips_sim_step(Policy& policy, const AnkleGeometry& geom,
                          const AnklePose& pose, const Eigen::Vector2d& chi_dot,
                          double t, const PdGains& gains,
                          const Eigen::Vector2d& last_action);

/// @brief One deployed control tick: PD straight on the measured motor state.
/// Performs no analytic solves.
Eigen::Vector2d lips_deploy_step(Policy& policy, const Eigen::Vector2d& q_meas,
                                 const Eigen::Vector2d& q_dot_meas, double t,
                                 const PdGains& gains,
                                 const Eigen::Vector2d& last_action,
                                 SolveCounter& solves);

/// @brief Torque-equivalence conversion tick: recover the pose from motor
/// measurements, rebuild the velocity map, and push the commanded ankle
/// torque down to motor torques.
///
/// Charges one pose recovery and one velocity-map evaluation to the counter.
/// Throws SingularConfiguration when the map is not invertible.
Eigen::Vector2d s2p_torque_step(const SerialAnkleCmd& serial_cmd,
                                const AnkleGeometry& geom,
                                const Eigen::Vector2d& q_meas,
                                const Eigen::Vector2d& q_dot_meas,
                                const PdGains& gains, SolveCounter& solves);

/// @brief Position-equivalence conversion tick: solve motor targets for the
/// commanded pose, run per-motor PD, then replace both torques with their
/// common-sign average magnitude.
///
/// The averaging models commanding the pair as one equivalent force; a
/// pure-pitch command therefore yields equal motor torques. A workspace
/// failure falls back to the previous targets in prev_q_des.
Eigen::Vector2d s2p_position_step(const SerialAnkleCmd& serial_cmd,
                                  const AnkleGeometry& geom,
                                  const Eigen::Vector2d& q_meas,
                                  const Eigen::Vector2d& q_dot_meas,
                                  const PdGains& gains,
                                  std::optional<Eigen::Vector2d>& prev_q_des,
                                  SolveCounter& solves);

/// @brief Damping-only tick: tau = -kd * q_dot_meas, clamped.
Eigen::Vector2d passive_step(const Eigen::Vector2d& q_dot_meas,
                             const PdGains& gains);

}  // namespace lips
