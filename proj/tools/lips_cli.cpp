#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lips/control.hpp"
#include "lips/errors.hpp"
#include "lips/geometry.hpp"
#include "lips/kinematics.hpp"
#include "lips/linkage_config.hpp"
#include "lips/mapping.hpp"
#include "lips/sim.hpp"
#include "lips/urdf.hpp"

namespace {

std::string fmt_num(double value) {
  char buffer[32];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string fmt_vec2(const Eigen::Vector2d& v) {
  return "[" + fmt_num(v[0]) + "," + fmt_num(v[1]) + "]";
}

std::string fmt_mat2(const Eigen::Matrix2d& m) {
  return "[[" + fmt_num(m(0, 0)) + "," + fmt_num(m(0, 1)) + "],[" +
         fmt_num(m(1, 0)) + "," + fmt_num(m(1, 1)) + "]]";
}

Eigen::Vector2d parse_pair(const std::string& text, const std::string& name) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw CLI::ValidationError(name, "expected two comma-separated numbers");
  }
  Eigen::Vector2d out;
  const std::string parts[2] = {text.substr(0, comma), text.substr(comma + 1)};
  for (int i = 0; i < 2; ++i) {
    char* end = nullptr;
    out[i] = std::strtod(parts[i].c_str(), &end);
    if (end == parts[i].c_str() || *end != '\0') {
      throw CLI::ValidationError(name, "'" + parts[i] + "' is not a number");
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw lips::Error("cannot open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw lips::Error("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw lips::Error("failed while writing '" + path + "'");
  }
}

lips::AnkleGeometry load_geometry(const std::string& path) {
  if (path.empty()) {
    return lips::reference_fixture();
  }
  return lips::load_linkage_config(read_file(path));
}

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_value) {
  if (seed_given) {
    return seed_value;
  }
  const char* env = std::getenv("LIPS_SEED");
  if (env == nullptr || *env == '\0') {
    return 0;
  }
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw lips::Error("LIPS_SEED is set to '" + std::string(env) +
                      "', which is not an unsigned integer");
  }
  return parsed;
}

struct SimulateArgs {
  std::string geometry_path;
  std::string method = "lips";
  std::string kind = "sinusoid";
  std::string amplitude = "0.05,0.2";
  std::string frequency = "0.3,0.5";
  double chirp_rate = 0.0;
  double duration = 10.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  bool train = false;
  std::string csv_path;
  std::string metrics_path;
};

lips::EpisodeConfig build_episode_config(const SimulateArgs& args,
                                         bool seed_given) {
  lips::EpisodeConfig config;
  config.geometry = load_geometry(args.geometry_path);
  config.method = *lips::parse_method(args.method);
  config.reference.kind = args.kind == "chirp"
                              ? lips::ReferenceSpec::Kind::Chirp
                              : lips::ReferenceSpec::Kind::Sinusoid;
  config.reference.amplitude = parse_pair(args.amplitude, "--amplitude");
  config.reference.frequency = parse_pair(args.frequency, "--frequency");
  config.reference.chirp_rate = args.chirp_rate;
  config.duration = args.duration;
  config.noise_sigma = args.noise_sigma;
  config.seed = resolve_seed(seed_given, args.seed);
  return config;
}

std::string metrics_json(const lips::EpisodeConfig& config,
                         const lips::Metrics& metrics) {
  std::string out = "{";
  out += "\"method\":\"" + lips::method_name(config.method) + "\",";
  out += "\"duration\":" + fmt_num(config.duration) + ",";
  out += "\"noise_sigma\":" + fmt_num(config.noise_sigma) + ",";
  out += "\"seed\":" + std::to_string(config.seed) + ",";
  out += "\"rms_tracking_error\":" + fmt_num(metrics.rms_tracking_error) + ",";
  out += "\"max_error\":" + fmt_num(metrics.max_error) + ",";
  out += "\"torque_jitter\":" + fmt_num(metrics.torque_jitter) + ",";
  out += "\"solve_count\":" + std::to_string(metrics.solve_count) + ",";
  out += std::string("\"terminated_early\":") +
         (metrics.terminated_early ? "true" : "false");
  out += "}";
  return out;
}

int run_ik(const std::string& geometry_path, const std::string& chi,
           const std::string& chi_dot, const std::string& chi_ddot) {
  const lips::AnkleGeometry geom = load_geometry(geometry_path);
  const lips::AnklePose pose =
      lips::AnklePose::from_vec(parse_pair(chi, "--chi"));

  std::string out;
  if (chi_dot.empty() && chi_ddot.empty()) {
    const lips::IkSolution solution = lips::ik_position(geom, pose);
    out = "{\"q\":" + fmt_vec2(solution.q) + "}";
  } else {
    lips::AnkleRates rates;
    if (!chi_dot.empty()) {
      rates.chi_dot = parse_pair(chi_dot, "--chi-dot");
    }
    const bool with_acc = !chi_ddot.empty();
    if (with_acc) {
      rates.chi_ddot = parse_pair(chi_ddot, "--chi-ddot");
    }
    const lips::MotorState motor =
        lips::state_serial_to_parallel(geom, pose, rates);
    out = "{\"q\":" + fmt_vec2(motor.q) +
          ",\"q_dot\":" + fmt_vec2(motor.q_dot);
    if (with_acc) {
      out += ",\"q_ddot\":" + fmt_vec2(motor.q_ddot);
    }
    out += "}";
  }
  std::cout << out << "\n";
  return 0;
}

int run_fk(const std::string& geometry_path, const std::string& q_str,
           const std::string& q_dot_str, const std::string& guess_str) {
  const lips::AnkleGeometry geom = load_geometry(geometry_path);
  const Eigen::Vector2d q = parse_pair(q_str, "--q");
  lips::AnklePose guess;
  if (!guess_str.empty()) {
    guess = lips::AnklePose::from_vec(parse_pair(guess_str, "--guess"));
  }
  const lips::FkResult fk = lips::fk_position(geom, q, guess);

  std::string out = "{\"chi\":[" + fmt_num(fk.pose.phi) + "," +
                    fmt_num(fk.pose.theta) + "]";
  if (!q_dot_str.empty()) {
    const Eigen::Vector2d q_dot = parse_pair(q_dot_str, "--q-dot");
    const lips::SerialState state =
        lips::state_parallel_to_serial(geom, q, q_dot, guess);
    out += ",\"chi_dot\":" + fmt_vec2(state.chi_dot);
  }
  out += ",\"iterations\":" + std::to_string(fk.iterations);
  out += ",\"residual\":" + fmt_num(fk.residual) + "}";
  std::cout << out << "\n";
  return 0;
}

int run_jac(const std::string& geometry_path, const std::string& chi,
            const std::string& chi_dot) {
  const lips::AnkleGeometry geom = load_geometry(geometry_path);
  const lips::AnklePose pose =
      lips::AnklePose::from_vec(parse_pair(chi, "--chi"));
  const Eigen::Vector2d q = lips::ik_position(geom, pose).q;

  std::string out;
  if (chi_dot.empty()) {
    out = "{\"j\":" + fmt_mat2(lips::jacobian(geom, pose, q)) + "}";
  } else {
    lips::AnkleRates rates;
    rates.chi_dot = parse_pair(chi_dot, "--chi-dot");
    const Eigen::Matrix2d j = lips::jacobian(geom, pose, q);
    const Eigen::Vector2d q_dot = lips::ik_velocity(j, rates.chi_dot);
    const Eigen::Matrix2d j_dot =
        lips::jacobian_dot(geom, pose, rates, q, q_dot);
    out = "{\"j\":" + fmt_mat2(j) + ",\"j_dot\":" + fmt_mat2(j_dot) + "}";
  }
  std::cout << out << "\n";
  return 0;
}

int run_map_torque(const std::string& geometry_path,
                   const std::string& direction, const std::string& tau_str,
                   const std::string& chi) {
  const lips::AnkleGeometry geom = load_geometry(geometry_path);
  const lips::AnklePose pose =
      lips::AnklePose::from_vec(parse_pair(chi, "--chi"));
  const Eigen::Vector2d tau = parse_pair(tau_str, "--tau");
  const Eigen::Vector2d q = lips::ik_position(geom, pose).q;
  const Eigen::Matrix2d j = lips::jacobian(geom, pose, q);

  const Eigen::Vector2d mapped =
      direction == "serial" ? lips::serial_torque_from_parallel(j, tau)
                            : lips::parallel_torque_from_serial(j, tau);
  std::cout << "{\"tau\":" + fmt_vec2(mapped) + "}\n";
  return 0;
}

int run_simulate(const SimulateArgs& args, bool seed_given) {
  const lips::EpisodeConfig config = build_episode_config(args, seed_given);
  const lips::EpisodeResult result = args.train
                                         ? lips::run_training_episode(config)
                                         : lips::run_episode(config);

  std::ostringstream csv;
  lips::write_waveform_csv(csv, result.log);
  const std::string metrics = metrics_json(config, result.metrics);

  if (!args.csv_path.empty()) {
    write_file(args.csv_path, csv.str());
  }
  if (!args.metrics_path.empty()) {
    write_file(args.metrics_path, metrics + "\n");
  }
  std::cout << metrics << "\n";
  return 0;
}

int run_bench(const SimulateArgs& args, bool seed_given, int n_envs) {
  lips::EpisodeConfig config = build_episode_config(args, seed_given);
  const lips::BatchResult batch = lips::batch_run(config, n_envs);

  std::string out = "{";
  out += "\"n_envs\":" + std::to_string(n_envs) + ",";
  out += "\"duration\":" + fmt_num(config.duration) + ",";
  out +=
      "\"throughput_ticks_per_s\":" + fmt_num(batch.aggregate.throughput) +
      ",";
  out += "\"aggregate\":" + metrics_json(config, batch.aggregate);
  out += "}";
  std::cout << out << "\n";
  return 0;
}

int run_parse_urdf(const std::string& in_path, const std::string& out_path,
                   const std::string& bind, const std::string& geometry_path) {
  lips::RobotModel model = lips::parse_urdf_subset(read_file(in_path));
  if (!bind.empty()) {
    const auto comma = bind.find(',');
    if (comma == std::string::npos) {
      throw CLI::ValidationError("--bind",
                                 "expected pitch_joint,roll_joint");
    }
    model = lips::bind_ankle(model, bind.substr(0, comma),
                             bind.substr(comma + 1),
                             load_geometry(geometry_path));
  }
  const std::string canonical = lips::serialize_urdf(model);
  if (out_path.empty()) {
    std::cout << canonical;
  } else {
    write_file(out_path, canonical);
  }
  return 0;
}

int run_validate(const std::string& geometry_path,
                 const std::string& urdf_path) {
  const lips::AnkleGeometry geom = load_geometry(geometry_path);
  std::string out = "{\"geometry_ok\":true,\"l2\":" + fmt_num(geom.l2);
  if (!urdf_path.empty()) {
    const lips::RobotModel model =
        lips::parse_urdf_subset(read_file(urdf_path));
    out += ",\"urdf_ok\":true,\"links\":" +
           std::to_string(model.links.size()) +
           ",\"joints\":" + std::to_string(model.joints.size());
  }
  out += "}";
  std::cout << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-ankle kinematics, torque maps, and desk-plant "
               "simulation"};
  app.require_subcommand(1);

  std::string geometry_path;
  app.add_option("--geometry", geometry_path,
                 "Linkage geometry JSON (defaults to the built-in fixture)");

  auto* ik_cmd = app.add_subcommand("ik", "Motor state for an ankle pose");
  std::string ik_chi, ik_chi_dot, ik_chi_ddot;
  ik_cmd->add_option("--chi", ik_chi, "Pose 'phi,theta' in radians")
      ->required();
  ik_cmd->add_option("--chi-dot", ik_chi_dot, "Pose rate 'dphi,dtheta'");
  ik_cmd->add_option("--chi-ddot", ik_chi_ddot,
                     "Pose acceleration 'ddphi,ddtheta'");

  auto* fk_cmd =
      app.add_subcommand("fk", "Ankle pose recovered from motor angles");
  std::string fk_q, fk_q_dot, fk_guess;
  fk_cmd->add_option("--q", fk_q, "Motor angles 'q1,q2' in radians")
      ->required();
  fk_cmd->add_option("--q-dot", fk_q_dot, "Motor rates 'dq1,dq2'");
  fk_cmd->add_option("--guess", fk_guess, "Initial pose guess 'phi,theta'");

  auto* jac_cmd =
      app.add_subcommand("jac", "Velocity map at an ankle pose");
  std::string jac_chi, jac_chi_dot;
  jac_cmd->add_option("--chi", jac_chi, "Pose 'phi,theta' in radians")
      ->required();
  jac_cmd->add_option("--chi-dot", jac_chi_dot,
                      "Pose rate, adds the map derivative to the output");

  auto* map_cmd = app.add_subcommand(
      "map-torque", "Map torques between motor and ankle space");
  std::string map_direction, map_tau, map_chi = "0,0";
  map_cmd
      ->add_option("--direction", map_direction,
                   "'serial' (motor to ankle) or 'parallel' (ankle to motor)")
      ->required()
      ->check(CLI::IsMember({"serial", "parallel"}));
  map_cmd->add_option("--tau", map_tau, "Torque pair 't1,t2'")->required();
  map_cmd->add_option("--chi", map_chi, "Pose 'phi,theta' (default 0,0)");

  SimulateArgs sim_args;
  auto add_episode_options = [&](CLI::App* cmd) {
    cmd->add_option("--method", sim_args.method,
                    "lips, s2p-torque, s2p-position, or passive")
        ->check(CLI::IsMember(
            {"lips", "s2p-torque", "s2p-position", "passive"}));
    cmd->add_option("--reference", sim_args.kind,
                    "Reference kind: sinusoid or chirp")
        ->check(CLI::IsMember({"sinusoid", "chirp"}));
    cmd->add_option("--amplitude", sim_args.amplitude,
                    "Reference amplitude 'roll,pitch' in radians");
    cmd->add_option("--frequency", sim_args.frequency,
                    "Reference frequency 'roll,pitch' in Hz");
    cmd->add_option("--chirp-rate", sim_args.chirp_rate,
                    "Frequency sweep rate in Hz/s");
    cmd->add_option("--duration", sim_args.duration, "Episode length in s");
    cmd->add_option("--noise-sigma", sim_args.noise_sigma,
                    "Encoder noise standard deviation in rad");
    return cmd->add_option("--seed", sim_args.seed,
                           "Noise seed (overrides LIPS_SEED)");
  };

  auto* sim_cmd =
      app.add_subcommand("simulate", "Run one episode and report metrics");
  const CLI::Option* sim_seed_opt = add_episode_options(sim_cmd);
  sim_cmd->add_flag("--train", sim_args.train,
                    "Run the training-time loop instead of deployment");
  sim_cmd->add_option("--csv", sim_args.csv_path,
                      "Write the per-tick waveform CSV here");
  sim_cmd->add_option("--metrics", sim_args.metrics_path,
                      "Write the metrics JSON here");

  auto* bench_cmd = app.add_subcommand(
      "bench", "Run an episode batch and report throughput");
  int bench_envs = 4096;
  const CLI::Option* bench_seed_opt = add_episode_options(bench_cmd);
  bench_cmd->add_option("--envs", bench_envs, "Number of environments");

  auto* urdf_cmd = app.add_subcommand(
      "parse-urdf", "Parse a robot description and emit the canonical form");
  std::string urdf_in, urdf_out, urdf_bind;
  urdf_cmd->add_option("--in", urdf_in, "Input robot description file")
      ->required();
  urdf_cmd->add_option("--out", urdf_out,
                       "Output file (stdout when omitted)");
  urdf_cmd->add_option("--bind", urdf_bind,
                       "Validate an ankle binding 'pitch_joint,roll_joint'");

  auto* validate_cmd = app.add_subcommand(
      "validate", "Check a geometry file and optionally a robot description");
  std::string validate_urdf;
  validate_cmd->add_option("--urdf", validate_urdf,
                           "Robot description to check");

  for (CLI::App* sub :
       app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ik_cmd->parsed()) {
      return run_ik(geometry_path, ik_chi, ik_chi_dot, ik_chi_ddot);
    }
    if (fk_cmd->parsed()) {
      return run_fk(geometry_path, fk_q, fk_q_dot, fk_guess);
    }
    if (jac_cmd->parsed()) {
      return run_jac(geometry_path, jac_chi, jac_chi_dot);
    }
    if (map_cmd->parsed()) {
      return run_map_torque(geometry_path, map_direction, map_tau, map_chi);
    }
    if (sim_cmd->parsed()) {
      sim_args.geometry_path = geometry_path;
      return run_simulate(sim_args, sim_seed_opt->count() > 0);
    }
    if (bench_cmd->parsed()) {
      sim_args.geometry_path = geometry_path;
      if (sim_args.duration <= 0.0) {
        throw CLI::ValidationError("--duration", "must be positive");
      }
      return run_bench(sim_args, bench_seed_opt->count() > 0, bench_envs);
    }
    if (urdf_cmd->parsed()) {
      return run_parse_urdf(urdf_in, urdf_out, urdf_bind, geometry_path);
    }
    if (validate_cmd->parsed()) {
      return run_validate(geometry_path, validate_urdf);
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const lips::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
