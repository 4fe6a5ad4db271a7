#include "lips/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lips/errors.hpp"
#include "lips/kinematics.hpp"
#include "lips/mapping.hpp"

namespace lips {

namespace {

constexpr double kDivergenceRate = 50.0;

bool inside_pose_box(const AnkleGeometry& geom, const AnklePose& pose) {
  return pose.phi >= geom.phi_limits[0] && pose.phi <= geom.phi_limits[1] &&
         pose.theta >= geom.theta_limits[0] &&
         pose.theta <= geom.theta_limits[1];
}

double median(std::vector<double> values) {
  if (values.empty()) {
    return 0.0;
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

long long median_count(std::vector<long long> values) {
  if (values.empty()) {
    return 0;
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : (values[n / 2 - 1] + values[n / 2]) / 2;
}

/// Accumulates the per-tick tracking and smoothness statistics.
struct MetricsAccumulator {
  double sum_sq_error = 0.0;
  double max_error = 0.0;
  double jitter_sum = 0.0;
  long long jitter_terms = 0;
  long long ticks = 0;
  Eigen::Vector2d prev_tau = Eigen::Vector2d::Zero();
  bool has_prev_tau = false;

  void add_error(const Eigen::Vector2d& error) {
    sum_sq_error += error.squaredNorm();
    max_error = std::max(max_error, error.cwiseAbs().maxCoeff());
    ticks += 1;
  }

  void add_torque(const Eigen::Vector2d& tau) {
    if (has_prev_tau) {
      jitter_sum += (tau - prev_tau).cwiseAbs().sum();
      jitter_terms += 2;
    }
    prev_tau = tau;
    has_prev_tau = true;
  }

  void finish(Metrics& metrics) const {
    metrics.rms_tracking_error =
        ticks > 0 ? std::sqrt(sum_sq_error / (2.0 * ticks)) : 0.0;
    metrics.max_error = max_error;
    metrics.torque_jitter = jitter_terms > 0 ? jitter_sum / jitter_terms : 0.0;
  }
};

WaveformRow make_row(double t, const AnklePose& pose, const AnklePose& ref,
                     const Eigen::Vector2d& q, const Eigen::Vector2d& q_dot,
                     const Eigen::Vector2d& tau, long long solve_count) {
  WaveformRow row;
  row.t = t;
  row.phi = pose.phi;
  row.theta = pose.theta;
  row.phi_ref = ref.phi;
  row.theta_ref = ref.theta;
  row.q1 = q[0];
  row.q2 = q[1];
  row.q1_dot = q_dot[0];
  row.q2_dot = q_dot[1];
  row.tau1 = tau[0];
  row.tau2 = tau[1];
  row.solve_count = solve_count;
  return row;
}

}  // namespace

PlantState plant_step(const PlantState& state, const PlantParams& params,
                      const Eigen::Vector2d& tau_ankle) {
  PlantState next = state;
  const int substeps = std::max(
      1, static_cast<int>(std::lround(params.dt_control / params.dt_physics)));
  const double dt = params.dt_control / substeps;
  Eigen::Vector2d chi = next.pose.vec();
  for (int k = 0; k < substeps; ++k) {
    const Eigen::Vector2d acc =
        (tau_ankle - params.damping.cwiseProduct(next.chi_dot) -
         params.gravity_coeff.cwiseProduct(chi))
            .cwiseQuotient(params.inertia);
    next.chi_dot += dt * acc;
    chi += dt * next.chi_dot;
    if (next.chi_dot.cwiseAbs().maxCoeff() > kDivergenceRate) {
      throw Diverged("pose rate exceeded 50 rad/s");
    }
  }
  next.pose = AnklePose::from_vec(chi);
  next.t = state.t + params.dt_control;
  return next;
}

Eigen::Vector2d inject_encoder_noise(const Eigen::Vector2d& q, double sigma,
                                     Rng& rng) {
  if (sigma == 0.0) {
    return q;
  }
  return {q[0] + sigma * rng.normal(), q[1] + sigma * rng.normal()};
}

EpisodeResult run_episode(const EpisodeConfig& config) {
  EpisodeResult result;
  const AnkleGeometry& geom = config.geometry;
  ScriptedPolicy policy(geom, config.reference);
  Rng rng(config.seed);
  SolveCounter solves;
  std::optional<Eigen::Vector2d> prev_q_des;
  std::optional<MotorState> prev_plant_motor;

  PlantState state;
  const long long ticks =
      std::llround(config.duration / config.plant.dt_control);
  result.log.reserve(static_cast<std::size_t>(std::max<long long>(ticks, 0)));

  MetricsAccumulator acc;
  bool terminated = false;

  const auto wall_start = std::chrono::steady_clock::now();
  for (long long i = 0; i < ticks && !terminated; ++i) {
    const AnklePose chi_ref = policy.reference(state.t);
    acc.add_error(chi_ref.vec() - state.pose.vec());

    Eigen::Vector2d tau_p = Eigen::Vector2d::Zero();
    Eigen::Matrix2d j_true = Eigen::Matrix2d::Zero();
    Eigen::Vector2d q_true = Eigen::Vector2d::Zero();
    Eigen::Vector2d q_dot_true = Eigen::Vector2d::Zero();
    bool have_plant_state = false;
    try {
      const IkSolution plant_ik = ik_position(geom, state.pose,
                                              prev_plant_motor);
      q_true = plant_ik.q;
      prev_plant_motor = MotorState{q_true, Eigen::Vector2d::Zero(),
                                    Eigen::Vector2d::Zero()};
      j_true = jacobian(geom, state.pose, q_true);
      q_dot_true = j_true * state.chi_dot;
      have_plant_state = true;

      const Eigen::Vector2d q_meas =
          inject_encoder_noise(q_true, config.noise_sigma, rng);
      const Eigen::Vector2d q_dot_meas = q_dot_true;

      switch (config.method) {
        case Method::LiPS:
          tau_p = lips_deploy_step(policy, q_meas, q_dot_meas, state.t,
                                   config.gains, Eigen::Vector2d::Zero(),
                                   solves);
          break;
        case Method::S2PTorque: {
          solves.count += 1;
          const AnklePose chi_est = fk_position(geom, q_meas).pose;
          solves.count += 1;
          const Eigen::Vector2d q_est =
              ik_position(geom, chi_est,
                          MotorState{q_meas, Eigen::Vector2d::Zero(),
                                     Eigen::Vector2d::Zero()})
                  .q;
          solves.count += 1;
          const Eigen::Matrix2d j_est = jacobian(geom, chi_est, q_est);

          Observation obs;
          obs.pose = chi_est;
          obs.reference = chi_ref;
          const Eigen::Vector2d a_t = policy.act(obs, state.t);
          const Eigen::Vector2d tau_pd = pd_torque(
              config.gains, a_t, Eigen::Vector2d::Zero(), q_est, q_dot_meas);

          SerialAnkleCmd cmd;
          cmd.tau_s = serial_torque_from_parallel(j_est, tau_pd);
          tau_p = s2p_torque_step(cmd, geom, q_meas, q_dot_meas, config.gains,
                                  solves);
          break;
        }
        case Method::S2PPosition: {
          SerialAnkleCmd cmd;
          cmd.chi_des = chi_ref;
          tau_p = s2p_position_step(cmd, geom, q_meas, q_dot_meas,
                                    config.gains, prev_q_des, solves);
          break;
        }
        case Method::Passive:
          tau_p = passive_step(q_dot_meas, config.gains);
          break;
      }
    } catch (const Error&) {
      tau_p = Eigen::Vector2d::Zero();
      terminated = true;
    }

    acc.add_torque(tau_p);
    result.log.push_back(make_row(state.t, state.pose, chi_ref, q_true,
                                  q_dot_true, tau_p, solves.count));
    if (!have_plant_state) {
      break;
    }

    const Eigen::Vector2d tau_ankle =
        serial_torque_from_parallel(j_true, tau_p);
    try {
      state = plant_step(state, config.plant, tau_ankle);
    } catch (const Diverged&) {
      terminated = true;
      break;
    }
    if (!inside_pose_box(geom, state.pose)) {
      terminated = true;
      break;
    }
  }
  const auto wall_end = std::chrono::steady_clock::now();
  const double elapsed =
      std::chrono::duration<double>(wall_end - wall_start).count();

  acc.finish(result.metrics);
  result.metrics.solve_count = solves.count;
  result.metrics.terminated_early = terminated;
  result.metrics.throughput =
      elapsed > 0.0 ? static_cast<double>(acc.ticks) / elapsed : 0.0;
  return result;
}

BatchResult batch_run(const EpisodeConfig& config, int n_envs) {
  BatchResult result;
  result.per_env.reserve(static_cast<std::size_t>(std::max(n_envs, 0)));

  long long total_ticks = 0;
  const auto wall_start = std::chrono::steady_clock::now();
  for (int i = 0; i < n_envs; ++i) {
    EpisodeConfig env_config = config;
    env_config.seed = config.seed + static_cast<std::uint64_t>(i);
    EpisodeResult episode = run_episode(env_config);
    total_ticks += static_cast<long long>(episode.log.size());
    result.per_env.push_back(episode.metrics);
  }
  const auto wall_end = std::chrono::steady_clock::now();
  const double elapsed =
      std::chrono::duration<double>(wall_end - wall_start).count();

  std::vector<double> rms;
  std::vector<double> max_err;
  std::vector<double> jitter;
  std::vector<long long> solve_counts;
  for (const Metrics& m : result.per_env) {
    rms.push_back(m.rms_tracking_error);
    max_err.push_back(m.max_error);
    jitter.push_back(m.torque_jitter);
    solve_counts.push_back(m.solve_count);
    result.aggregate.terminated_early |= m.terminated_early;
  }
  result.aggregate.rms_tracking_error = median(std::move(rms));
  result.aggregate.max_error = median(std::move(max_err));
  result.aggregate.torque_jitter = median(std::move(jitter));
  result.aggregate.solve_count = median_count(std::move(solve_counts));
  result.aggregate.throughput =
      elapsed > 0.0 ? static_cast<double>(total_ticks) / elapsed : 0.0;
  return result;
}

EpisodeResult run_training_episode(const EpisodeConfig& config) {
  EpisodeResult result;
  const AnkleGeometry& geom = config.geometry;
  ScriptedPolicy policy(geom, config.reference);

  PlantState state;
  Eigen::Vector2d last_action = Eigen::Vector2d::Zero();
  long long training_solves = 0;
  const long long ticks =
      std::llround(config.duration / config.plant.dt_control);
  result.log.reserve(static_cast<std::size_t>(std::max<long long>(ticks, 0)));

  MetricsAccumulator acc;
  bool terminated = false;

  const auto wall_start = std::chrono::steady_clock::now();
  for (long long i = 0; i < ticks && !terminated; ++i) {
    LipsSimStep step;
    try {
      step = lips_sim_step(policy, geom, state.pose, state.chi_dot, state.t,
                           config.gains, last_action);
    } catch (const Error&) {
      terminated = true;
      break;
    }
    training_solves += 2;
    last_action = step.io.a_t;

    acc.add_error(step.io.s_t.reference.vec() - state.pose.vec());
    acc.add_torque(step.tau_p);
    result.log.push_back(make_row(state.t, state.pose, step.io.s_t.reference,
                                  step.motor.q, step.motor.q_dot, step.tau_p,
                                  training_solves));

    try {
      state = plant_step(state, config.plant, step.tau_s);
    } catch (const Diverged&) {
      terminated = true;
      break;
    }
    if (!inside_pose_box(geom, state.pose)) {
      terminated = true;
      break;
    }
  }
  const auto wall_end = std::chrono::steady_clock::now();
  const double elapsed =
      std::chrono::duration<double>(wall_end - wall_start).count();

  acc.finish(result.metrics);
  result.metrics.solve_count = training_solves;
  result.metrics.terminated_early = terminated;
  result.metrics.throughput =
      elapsed > 0.0 ? static_cast<double>(acc.ticks) / elapsed : 0.0;
  return result;
}

void write_waveform_csv(std::ostream& out,
                        const std::vector<WaveformRow>& log) {
  out << "t,phi,theta,phi_ref,theta_ref,q1,q2,q1_dot,q2_dot,tau1,tau2,"
         "solve_count\n";
  char buffer[512];
  for (const WaveformRow& row : log) {
    std::snprintf(buffer, sizeof(buffer),
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                  "%.10g,%.10g,%lld\n",
                  row.t, row.phi, row.theta, row.phi_ref, row.theta_ref,
                  row.q1, row.q2, row.q1_dot, row.q2_dot, row.tau1, row.tau2,
                  row.solve_count);
    out << buffer;
  }
}

}  // namespace lips
