#include <vector>

#include <benchmark/benchmark.h>

#include "lips/control.hpp"
#include "lips/geometry.hpp"
#include "lips/kinematics.hpp"
#include "lips/mapping.hpp"
#include "lips/rng.hpp"
#include "lips/sim.hpp"

namespace {

using namespace lips;

std::vector<AnklePose> sample_poses(int count) {
  const AnkleGeometry geom = reference_fixture();
  Rng rng(7);
  std::vector<AnklePose> poses;
  poses.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double phi = geom.phi_limits[0] +
                       0.9 * rng.uniform() *
                           (geom.phi_limits[1] - geom.phi_limits[0]);
    const double theta = geom.theta_limits[0] +
                         0.9 * rng.uniform() *
                             (geom.theta_limits[1] - geom.theta_limits[0]);
    poses.push_back({phi, theta});
  }
  return poses;
}

void BM_IkPosition(benchmark::State& state) {
  const AnkleGeometry geom = reference_fixture();
  const std::vector<AnklePose> poses = sample_poses(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ik_position(geom, poses[i++ % poses.size()]));
  }
}
BENCHMARK(BM_IkPosition);

void BM_Jacobian(benchmark::State& state) {
  const AnkleGeometry geom = reference_fixture();
  const std::vector<AnklePose> poses = sample_poses(256);
  std::vector<Eigen::Vector2d> qs;
  for (const AnklePose& pose : poses) {
    qs.push_back(ik_position(geom, pose).q);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t k = i++ % poses.size();
    benchmark::DoNotOptimize(jacobian(geom, poses[k], qs[k]));
  }
}
BENCHMARK(BM_Jacobian);

void BM_JacobianDot(benchmark::State& state) {
  const AnkleGeometry geom = reference_fixture();
  const std::vector<AnklePose> poses = sample_poses(256);
  AnkleRates rates;
  rates.chi_dot = {0.5, -0.3};
  std::vector<Eigen::Vector2d> qs;
  std::vector<Eigen::Vector2d> q_dots;
  for (const AnklePose& pose : poses) {
    const Eigen::Vector2d q = ik_position(geom, pose).q;
    qs.push_back(q);
    q_dots.push_back(ik_velocity(jacobian(geom, pose, q), rates.chi_dot));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t k = i++ % poses.size();
    benchmark::DoNotOptimize(
        jacobian_dot(geom, poses[k], rates, qs[k], q_dots[k]));
  }
}
BENCHMARK(BM_JacobianDot);

void BM_FkPosition(benchmark::State& state) {
  const AnkleGeometry geom = reference_fixture();
  const std::vector<AnklePose> poses = sample_poses(256);
  std::vector<Eigen::Vector2d> qs;
  for (const AnklePose& pose : poses) {
    qs.push_back(ik_position(geom, pose).q);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fk_position(geom, qs[i++ % qs.size()]));
  }
}
BENCHMARK(BM_FkPosition);

void BM_FullPipeline(benchmark::State& state) {
  const AnkleGeometry geom = reference_fixture();
  const std::vector<AnklePose> poses = sample_poses(256);
  AnkleRates rates;
  rates.chi_dot = {0.4, -0.2};
  rates.chi_ddot = {1.0, 0.5};
  std::size_t i = 0;
  for (auto _ : state) {
    const AnklePose& pose = poses[i++ % poses.size()];
    const MotorState motor = state_serial_to_parallel(geom, pose, rates);
    const Eigen::Matrix2d j = jacobian(geom, pose, motor.q);
    benchmark::DoNotOptimize(
        serial_torque_from_parallel(j, Eigen::Vector2d{1.0, -0.5}));
  }
}
BENCHMARK(BM_FullPipeline);

void BM_EpisodeTick(benchmark::State& state) {
  EpisodeConfig config;
  config.geometry = reference_fixture();
  config.noise_sigma = 2e-3;
  config.duration = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_episode(config));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_EpisodeTick);

}  // namespace

BENCHMARK_MAIN();
