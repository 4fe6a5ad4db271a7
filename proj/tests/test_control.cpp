#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>

#include "lips/control.hpp"
#include "lips/errors.hpp"
#include "lips/geometry.hpp"
#include "lips/kinematics.hpp"
#include "lips/mapping.hpp"
#include "lips/rng.hpp"
#include "oracles.hpp"

using namespace lips;

TEST_CASE("method names round trip and unknown names are rejected") {
  for (Method m : {Method::LiPS, Method::S2PTorque, Method::S2PPosition,
                   Method::Passive}) {
    const auto parsed = parse_method(method_name(m));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == m);
  }
  CHECK(!parse_method("pid").has_value());
  CHECK(!parse_method("").has_value());
  CHECK(!parse_method("LIPS").has_value());
}

TEST_CASE("motor pd produces the textbook responses") {
  PdGains gains;
  gains.kp = {0.0, 0.0};
  gains.kd = {10.0, 10.0};
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  const Eigen::Vector2d tau =
      pd_torque(gains, zero, zero, zero, {0.5, 0.5});
  CHECK(tau[0] == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(tau[1] == doctest::Approx(-5.0).epsilon(1e-15));

  PdGains stiff;
  stiff.kp = {1000.0, 1000.0};
  stiff.kd = {0.0, 0.0};
  const Eigen::Vector2d clamped =
      pd_torque(stiff, {1.0, -1.0}, zero, zero, zero);
  CHECK(clamped[0] == stiff.tau_limit);
  CHECK(clamped[1] == -stiff.tau_limit);
}

TEST_CASE("motor pd is odd under state negation") {
  PdGains gains;
  Rng rng(201);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d q_des = testing::sample_vec2(rng, 1.0);
    const Eigen::Vector2d qd_des = testing::sample_vec2(rng, 1.0);
    const Eigen::Vector2d q = testing::sample_vec2(rng, 1.0);
    const Eigen::Vector2d qd = testing::sample_vec2(rng, 1.0);
    const Eigen::Vector2d tau = pd_torque(gains, q_des, qd_des, q, qd);
    const Eigen::Vector2d neg = pd_torque(gains, -q_des, -qd_des, -q, -qd);
    CHECK((tau + neg).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("reference trajectory matches frozen sinusoid values") {
  ReferenceSpec spec;
  AnklePose r = reference_pose(spec, 0.7);
  CHECK(r.phi == doctest::Approx(0.048429158056431554).epsilon(1e-14));
  CHECK(r.theta == doctest::Approx(0.16180339887498951).epsilon(1e-14));
  r = reference_pose(spec, 2.3);
  CHECK(r.phi == doctest::Approx(-0.046488824294412562).epsilon(1e-14));
  CHECK(r.theta == doctest::Approx(0.16180339887498937).epsilon(1e-14));
  CHECK(reference_pose(spec, 0.0).phi == 0.0);
  CHECK(reference_pose(spec, 0.0).theta == 0.0);
}

TEST_CASE("reference trajectory matches frozen chirp and phase values") {
  ReferenceSpec spec;
  spec.kind = ReferenceSpec::Kind::Chirp;
  spec.chirp_rate = 0.1;
  AnklePose r = reference_pose(spec, 1.0);
  CHECK(r.phi == doctest::Approx(0.040450849718747378).epsilon(1e-14));
  CHECK(r.theta == doctest::Approx(-0.061803398874989549).epsilon(1e-14));
  r = reference_pose(spec, 3.0);
  CHECK(r.phi == doctest::Approx(0.040450849718747385).epsilon(1e-13));
  CHECK(r.theta == doctest::Approx(-0.061803398874989236).epsilon(1e-13));

  ReferenceSpec phased;
  phased.phase = {M_PI / 2.0, M_PI / 2.0};
  r = reference_pose(phased, 0.0);
  CHECK(r.phi == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(r.theta == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("scripted policy is quiet for a zero-amplitude reference") {
  const AnkleGeometry geom = reference_fixture();
  ReferenceSpec spec;
  spec.amplitude = {0.0, 0.0};
  const Eigen::Vector2d a = scripted_policy(geom, spec, 1.7);
  CHECK(std::abs(a[0]) < 1e-12);
  CHECK(std::abs(a[1]) < 1e-12);
}

TEST_CASE("scripted policy drives both motors equally for pure pitch") {
  const AnkleGeometry geom = reference_fixture();
  ReferenceSpec spec;
  spec.amplitude = {0.0, 0.2};
  for (double t : {0.1, 0.5, 0.9, 1.4}) {
    const Eigen::Vector2d a = scripted_policy(geom, spec, t);
    CHECK(std::abs(a[0] - a[1]) < 1e-12);
  }
}

TEST_CASE("scripted policy keeps targets inside the motor limits") {
  const AnkleGeometry geom = reference_fixture();
  ReferenceSpec spec;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.1 * i;
    const Eigen::Vector2d a = scripted_policy(geom, spec, t);
    CHECK(a[0] >= geom.q_limits[0]);
    CHECK(a[0] <= geom.q_limits[1]);
    CHECK(a[1] >= geom.q_limits[0]);
    CHECK(a[1] <= geom.q_limits[1]);
  }

  AnkleGeometry tight = reference_fixture();
  tight.q_limits = {-0.2, 0.2};
  CHECK_THROWS_AS(scripted_policy(tight, spec, 0.6), LimitError);
}

TEST_CASE("training tick lifts the motor pd through the velocity map") {
  const AnkleGeometry geom = reference_fixture();
  ScriptedPolicy policy(geom, ReferenceSpec{});
  const AnklePose pose{0.03, 0.12};
  const Eigen::Vector2d chi_dot{0.2, -0.1};
  const PdGains gains;
  const double t = 0.45;
  const LipsSimStep step =
      lips_sim_step(policy, geom, pose, chi_dot, t, gains,
                    Eigen::Vector2d::Zero());

  const Eigen::Vector2d q = ik_position(geom, pose).q;
  const Eigen::Matrix2d j = jacobian(geom, pose, q);
  const Eigen::Vector2d q_dot = ik_velocity(j, chi_dot);
  const Eigen::Vector2d a = scripted_policy(geom, ReferenceSpec{}, t);
  const Eigen::Vector2d tau_p =
      pd_torque(gains, a, Eigen::Vector2d::Zero(), q, q_dot);
  const Eigen::Vector2d tau_s = serial_torque_from_parallel(j, tau_p);

  CHECK(step.motor.q == q);
  CHECK(step.motor.q_dot == q_dot);
  CHECK(step.io.a_t == a);
  CHECK(step.tau_p == tau_p);
  CHECK(step.tau_s == tau_s);

  const Eigen::Vector2d err = step.io.s_t.reference.vec() - pose.vec();
  const double reward = -(err.squaredNorm() + 0.01 * tau_p.squaredNorm());
  CHECK(step.io.r_t == reward);
  CHECK(step.io.s_t.pose.phi == pose.phi);
  CHECK(step.io.s_t.pose.theta == pose.theta);
}

TEST_CASE("deployed tick runs without any analytic solves") {
  const AnkleGeometry geom = reference_fixture();
  ScriptedPolicy policy(geom, ReferenceSpec{});
  SolveCounter solves;
  const PdGains gains;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.01 * i;
    lips_deploy_step(policy, {0.01, -0.02}, {0.1, 0.0}, t, gains,
                     Eigen::Vector2d::Zero(), solves);
  }
  CHECK(solves.count == 0);
}

TEST_CASE("deployed tick equals pd against the policy action") {
  const AnkleGeometry geom = reference_fixture();
  ScriptedPolicy policy(geom, ReferenceSpec{});
  SolveCounter solves;
  const PdGains gains;
  const double t = 0.83;
  const Eigen::Vector2d q_meas{0.05, -0.01};
  const Eigen::Vector2d q_dot_meas{0.3, 0.2};
  const Eigen::Vector2d tau = lips_deploy_step(
      policy, q_meas, q_dot_meas, t, gains, Eigen::Vector2d::Zero(), solves);
  const Eigen::Vector2d a = scripted_policy(geom, ReferenceSpec{}, t);
  const Eigen::Vector2d expect =
      pd_torque(gains, a, Eigen::Vector2d::Zero(), q_meas, q_dot_meas);
  CHECK(tau == expect);
}

TEST_CASE("torque conversion tick charges two solves and inverts the map") {
  const AnkleGeometry geom = reference_fixture();
  const AnklePose pose{0.05, 0.1};
  const Eigen::Vector2d q = ik_position(geom, pose).q;
  const Eigen::Matrix2d j = jacobian(geom, pose, q);

  SerialAnkleCmd cmd;
  cmd.tau_s = {0.4, -1.2};
  SolveCounter solves;
  const Eigen::Vector2d tau_p =
      s2p_torque_step(cmd, geom, q, Eigen::Vector2d::Zero(), PdGains{},
                      solves);
  CHECK(solves.count == 2);
  const Eigen::Vector2d expect = parallel_torque_from_serial(j, cmd.tau_s);
  CHECK((tau_p - expect).cwiseAbs().maxCoeff() < 1e-9);

  s2p_torque_step(cmd, geom, q, Eigen::Vector2d::Zero(), PdGains{}, solves);
  CHECK(solves.count == 4);
}

TEST_CASE("position conversion tick charges one solve per commanded pose") {
  const AnkleGeometry geom = reference_fixture();
  SerialAnkleCmd cmd;
  cmd.chi_des = AnklePose{0.0, 0.1};
  std::optional<Eigen::Vector2d> prev;
  SolveCounter solves;
  s2p_position_step(cmd, geom, Eigen::Vector2d::Zero(),
                    Eigen::Vector2d::Zero(), PdGains{}, prev, solves);
  CHECK(solves.count == 1);
  REQUIRE(prev.has_value());

  SerialAnkleCmd bare;
  s2p_position_step(bare, geom, Eigen::Vector2d::Zero(),
                    Eigen::Vector2d::Zero(), PdGains{}, prev, solves);
  CHECK(solves.count == 1);
}

TEST_CASE("position conversion collapses both motors onto one torque") {
  const AnkleGeometry geom = reference_fixture();
  const PdGains gains;
  SerialAnkleCmd cmd;
  cmd.chi_des = AnklePose{0.0, 0.15};
  std::optional<Eigen::Vector2d> prev;
  SolveCounter solves;
  const Eigen::Vector2d q_meas{0.02, -0.05};
  const Eigen::Vector2d q_dot_meas{0.1, 0.3};
  const Eigen::Vector2d tau = s2p_position_step(cmd, geom, q_meas, q_dot_meas,
                                                gains, prev, solves);
  CHECK(tau[0] == tau[1]);

  const Eigen::Vector2d q_des = ik_position(geom, AnklePose{0.0, 0.15}).q;
  const Eigen::Vector2d raw =
      pd_torque(gains, q_des, Eigen::Vector2d::Zero(), q_meas, q_dot_meas);
  const double sign = raw[0] + raw[1] >= 0.0 ? 1.0 : -1.0;
  const double mean = 0.5 * (std::abs(raw[0]) + std::abs(raw[1]));
  CHECK(tau[0] == sign * mean);
}

TEST_CASE("position conversion preserves a symmetric pure-pitch command") {
  const AnkleGeometry geom = reference_fixture();
  const PdGains gains;
  SerialAnkleCmd cmd;
  cmd.chi_des = AnklePose{0.0, 0.2};
  std::optional<Eigen::Vector2d> prev;
  SolveCounter solves;
  const Eigen::Vector2d q_des = ik_position(geom, AnklePose{0.0, 0.2}).q;
  const Eigen::Vector2d q_meas{0.0, 0.0};
  const Eigen::Vector2d tau = s2p_position_step(
      cmd, geom, q_meas, Eigen::Vector2d::Zero(), gains, prev, solves);
  const Eigen::Vector2d raw = pd_torque(gains, q_des, Eigen::Vector2d::Zero(),
                                        q_meas, Eigen::Vector2d::Zero());
  CHECK(raw[0] == doctest::Approx(raw[1]).epsilon(1e-12));
  CHECK(tau[0] == doctest::Approx(raw[0]).epsilon(1e-12));
  CHECK(tau[1] == doctest::Approx(raw[1]).epsilon(1e-12));
}

TEST_CASE("position conversion keeps the last targets on workspace failure") {
  const AnkleGeometry geom = reference_fixture();
  const PdGains gains;
  std::optional<Eigen::Vector2d> prev;
  SolveCounter solves;

  SerialAnkleCmd good;
  good.chi_des = AnklePose{0.0, 0.1};
  s2p_position_step(good, geom, Eigen::Vector2d::Zero(),
                    Eigen::Vector2d::Zero(), gains, prev, solves);
  REQUIRE(prev.has_value());
  const Eigen::Vector2d kept = *prev;

  SerialAnkleCmd bad;
  bad.chi_des = AnklePose{0.0, 1.4};
  const Eigen::Vector2d tau = s2p_position_step(
      bad, geom, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), gains,
      prev, solves);
  CHECK(solves.count == 2);
  CHECK(*prev == kept);

  const Eigen::Vector2d raw =
      pd_torque(gains, kept, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                Eigen::Vector2d::Zero());
  const double sign = raw[0] + raw[1] >= 0.0 ? 1.0 : -1.0;
  const double mean = 0.5 * (std::abs(raw[0]) + std::abs(raw[1]));
  CHECK(tau[0] == sign * mean);
}

TEST_CASE("damping tick opposes motion and respects the clamp") {
  PdGains gains;
  gains.kd = {10.0, 10.0};
  const Eigen::Vector2d tau = passive_step({0.5, -0.25}, gains);
  CHECK(tau[0] == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(tau[1] == doctest::Approx(2.5).epsilon(1e-15));

  const Eigen::Vector2d big = passive_step({100.0, -100.0}, gains);
  CHECK(big[0] == -gains.tau_limit);
  CHECK(big[1] == gains.tau_limit);
}

TEST_CASE("position gain scales the torque spread under encoder noise") {
  PdGains gains;
  Rng rng(202);
  const double sigma = 2e-3;
  const int n = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d q_noise{sigma * rng.normal(), sigma * rng.normal()};
    const Eigen::Vector2d tau = pd_torque(gains, Eigen::Vector2d::Zero(),
                                          Eigen::Vector2d::Zero(), q_noise,
                                          Eigen::Vector2d::Zero());
    sum += tau[0];
    sum_sq += tau[0] * tau[0];
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double expect = gains.kp[0] * gains.kp[0] * sigma * sigma;
  CHECK(std::abs(mean) < 3.0 * gains.kp[0] * sigma / std::sqrt(double(n)));
  CHECK(var == doctest::Approx(expect).epsilon(0.05));
}
