#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "lips/control.hpp"
#include "lips/geometry.hpp"
#include "lips/rng.hpp"

namespace lips {

/// @brief Ankle-space state of the desk plant.
struct PlantState {
  AnklePose pose;
  Eigen::Vector2d chi_dot = Eigen::Vector2d::Zero();
  double t = 0.0;
};

/// @brief Rigid-footplate plant model integrated in ankle space.
///
/// Gravity is the small-angle restoring torque gravity_coeff * chi; motors
/// enter only through the ankle torque supplied by the caller. The values are
/// synthetic desk-scale defaults, not measurements of any robot.
struct PlantParams {
  Eigen::Vector2d inertia = {0.02, 0.03};
  Eigen::Vector2d damping = {0.05, 0.05};
  Eigen::Vector2d gravity_coeff = {2.0, 2.5};
  double dt_physics = 1e-3;
  double dt_control = 0.01;
};

/// @brief Episode summary statistics.
struct Metrics {
  double rms_tracking_error = 0.0;
  double max_error = 0.0;
  double torque_jitter = 0.0;
  long long solve_count = 0;
  bool terminated_early = false;
  double throughput = 0.0;
};

/// @brief One control tick of the episode log.
struct WaveformRow {
  double t = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double phi_ref = 0.0;
  double theta_ref = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q1_dot = 0.0;
  double q2_dot = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  long long solve_count = 0;
};

/// @brief Everything a single episode needs.
struct EpisodeConfig {
  Method method = Method::LiPS;
  AnkleGeometry geometry;
  PlantParams plant;
  PdGains gains;
  ReferenceSpec reference;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  double duration = 10.0;
};

/// @brief Metrics plus the full per-tick log.
struct EpisodeResult {
  Metrics metrics;
  std::vector<WaveformRow> log;
};

/// @brief Aggregate over a batch plus the per-environment summaries.
struct BatchResult {
  Metrics aggregate;
  std::vector<Metrics> per_env;
};

/// @brief Advances one control period with the ankle torque held (zero-order
/// hold), integrating semi-implicit Euler substeps of dt_physics.
///
/// Throws Diverged when any pose rate exceeds 50 rad/s.
PlantState plant_step(const PlantState& state, const PlantParams& params,
                      const Eigen::Vector2d& tau_ankle);

/// @brief Adds i.i.d. zero-mean Gaussian noise; sigma of zero is the identity
/// and consumes no draws.
Eigen::Vector2d inject_encoder_noise(const Eigen::Vector2d& q, double sigma,
                                     Rng& rng);

/// @brief Runs one deployment episode with the configured method.
///
/// Kinematic failures, divergence, and pose-box exit set terminated_early on
/// the metrics instead of propagating.
EpisodeResult run_episode(const EpisodeConfig& config);

/// @brief Runs n_envs episodes with per-environment seeds seed+i and
/// aggregates metrics by median (solve counts included); terminated_early is
/// the disjunction and throughput sums over environments.
BatchResult batch_run(const EpisodeConfig& config, int n_envs);

/// @brief Runs the training-time loop: policy and motor-space PD against the
/// mapped motor state, the resulting ankle torque applied to the plant
/// directly.
EpisodeResult run_training_episode(const EpisodeConfig& config);

/// @brief Writes the per-tick log as CSV with a fixed column header.
void write_waveform_csv(std::ostream& out, const std::vector<WaveformRow>& log);

}  // namespace lips
