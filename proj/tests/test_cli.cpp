#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "oracles.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::filesystem::path err_path =
      std::filesystem::path("cli_artifacts") / "stderr.txt";
  std::filesystem::create_directories(err_path.parent_path());

  std::string command = env.empty() ? "" : env + " ";
  command += std::string(LIPS_CLI_PATH) + " " + args + " 2>" +
             err_path.string();

  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> chunk{};
  std::size_t n = 0;
  while ((n = fread(chunk.data(), 1, chunk.size(), pipe)) > 0) {
    result.out.append(chunk.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

  std::ifstream err_file(err_path);
  std::ostringstream err_text;
  err_text << err_file.rdbuf();
  result.err = err_text.str();
  return result;
}

std::string artifact(const std::string& name) {
  std::filesystem::create_directories("cli_artifacts");
  return (std::filesystem::path("cli_artifacts") / name).string();
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text) {
    lines += c == '\n' ? 1 : 0;
  }
  return lines;
}

}  // namespace

TEST_CASE("neutral pose solves to zero motor angles") {
  const CliResult result = run_cli("ik --chi 0,0");
  CHECK(result.exit_code == 0);
  CHECK(result.out == "{\"q\":[0,0]}\n");
  CHECK(result.err.empty());
}

TEST_CASE("pose solve round trips through the command line") {
  const CliResult ik = run_cli("ik --chi 0.2,-0.3");
  REQUIRE(ik.exit_code == 0);
  double q1 = 0.0, q2 = 0.0;
  REQUIRE(std::sscanf(ik.out.c_str(), "{\"q\":[%lf,%lf]}", &q1, &q2) == 2);

  char fk_args[128];
  std::snprintf(fk_args, sizeof(fk_args), "fk --q %.17g,%.17g", q1, q2);
  const CliResult fk = run_cli(fk_args);
  REQUIRE(fk.exit_code == 0);
  double phi = 0.0, theta = 0.0;
  REQUIRE(std::sscanf(fk.out.c_str(), "{\"chi\":[%lf,%lf]", &phi, &theta) ==
          2);
  CHECK(phi == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(theta == doctest::Approx(-0.3).epsilon(1e-8));
}

TEST_CASE("workspace violations exit with the module failure code") {
  const CliResult result = run_cli("ik --chi 0,1.4");
  CHECK(result.exit_code == 1);
  CHECK(result.out.empty());
  CHECK(result.err.rfind("error: ", 0) == 0);
  CHECK(count_lines(result.err) == 1);
}

TEST_CASE("usage mistakes exit with the usage failure code") {
  CHECK(run_cli("ik --chi notanumber").exit_code == 2);
  CHECK(run_cli("ik").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("map-torque --direction sideways --tau 1,1").exit_code == 2);
  CHECK(run_cli("simulate --method pid").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("help is a success") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("torque map matches the neutral-pose expectation") {
  const CliResult result = run_cli("map-torque --direction serial --tau 1,1");
  CHECK(result.exit_code == 0);
  double t1 = -1.0, t2 = 0.0;
  REQUIRE(std::sscanf(result.out.c_str(), "{\"tau\":[%lf,%lf]}", &t1, &t2) ==
          2);
  CHECK(t1 == 0.0);
  CHECK(t2 == doctest::Approx(2.230769230769231).epsilon(1e-12));
}

TEST_CASE("episode artifacts are byte identical for a repeated invocation") {
  const std::string base = "simulate --duration 5 --noise-sigma 2e-3 --seed 3";
  const CliResult first =
      run_cli(base + " --csv " + artifact("a.csv") + " --metrics " +
              artifact("a.json"));
  const CliResult second =
      run_cli(base + " --csv " + artifact("b.csv") + " --metrics " +
              artifact("b.json"));
  REQUIRE(first.exit_code == 0);
  REQUIRE(second.exit_code == 0);

  const std::string csv_a = lips::testing::read_file(artifact("a.csv"));
  const std::string csv_b = lips::testing::read_file(artifact("b.csv"));
  CHECK(csv_a == csv_b);
  CHECK(count_lines(csv_a) == 501);
  CHECK(csv_a.rfind("t,phi,theta,phi_ref,theta_ref,q1,q2,q1_dot,q2_dot,tau1,"
                    "tau2,solve_count\n",
                    0) == 0);

  CHECK(lips::testing::read_file(artifact("a.json")) ==
        lips::testing::read_file(artifact("b.json")));
  CHECK(first.out == second.out);
  CHECK(first.out.find("throughput") == std::string::npos);
  CHECK(first.out.find("\"solve_count\":0") != std::string::npos);
}

TEST_CASE("the seed environment override loses to an explicit seed") {
  const std::string base = "simulate --duration 1 --noise-sigma 2e-3";
  const CliResult explicit_seed =
      run_cli(base + " --seed 5", "LIPS_SEED=99");
  const CliResult env_seed = run_cli(base, "LIPS_SEED=5");
  const CliResult default_seed = run_cli(base, "LIPS_SEED=");
  const CliResult seed_zero = run_cli(base + " --seed 0", "LIPS_SEED=");
  REQUIRE(explicit_seed.exit_code == 0);
  CHECK(explicit_seed.out == env_seed.out);
  CHECK(default_seed.out == seed_zero.out);
  CHECK(explicit_seed.out != default_seed.out);

  const CliResult bad_env = run_cli(base, "LIPS_SEED=junk");
  CHECK(bad_env.exit_code == 1);
}

TEST_CASE("robot descriptions pass through in canonical form") {
  const std::string corpus = lips::testing::data_path("urdf");
  const CliResult direct =
      run_cli("parse-urdf --in " + corpus + "/ankle_valid.urdf");
  REQUIRE(direct.exit_code == 0);
  CHECK(direct.out.find("<robot name=\"desk_ankle\">") != std::string::npos);

  const std::string canonical_path = artifact("canonical.urdf");
  const CliResult to_file = run_cli("parse-urdf --in " + corpus +
                                    "/ankle_valid.urdf --out " +
                                    canonical_path);
  REQUIRE(to_file.exit_code == 0);
  const CliResult reparse = run_cli("parse-urdf --in " + canonical_path);
  REQUIRE(reparse.exit_code == 0);
  CHECK(reparse.out == lips::testing::read_file(canonical_path));

  const CliResult bound = run_cli("parse-urdf --in " + corpus +
                                  "/ankle_valid.urdf --bind "
                                  "ankle_pitch,ankle_roll");
  CHECK(bound.exit_code == 0);
}

TEST_CASE("every malformed corpus entry exits nonzero with one error line") {
  const std::string corpus = lips::testing::data_path("urdf");
  for (const char* name :
       {"syntax_unclosed.urdf", "syntax_doctype.urdf",
        "syntax_bare_attr.urdf", "schema_missing_type.urdf",
        "schema_bad_type.urdf", "schema_unknown_attr.urdf",
        "schema_missing_link.urdf", "loop_duplicate_child.urdf",
        "loop_cycle.urdf", "loop_two_roots.urdf"}) {
    const CliResult result =
        run_cli("parse-urdf --in " + corpus + "/" + name);
    CHECK(result.exit_code == 1);
    CHECK(result.err.rfind("error: ", 0) == 0);
    CHECK(count_lines(result.err) == 1);
  }
}

TEST_CASE("binding failures surface as module errors") {
  const std::string corpus = lips::testing::data_path("urdf");
  const CliResult skewed = run_cli("parse-urdf --in " + corpus +
                                   "/bind_skewed_axis.urdf --bind "
                                   "ankle_pitch,ankle_roll");
  CHECK(skewed.exit_code == 1);
  CHECK(skewed.err.find("axis") != std::string::npos);
}

TEST_CASE("geometry files load through the validate subcommand") {
  const CliResult builtin = run_cli("validate");
  CHECK(builtin.exit_code == 0);
  CHECK(builtin.out.find("\"geometry_ok\":true") != std::string::npos);
  CHECK(builtin.out.find("0.26004807247891687") != std::string::npos);

  const CliResult from_file =
      run_cli("validate --geometry " + lips::testing::data_path("fixture.json"));
  CHECK(from_file.exit_code == 0);
  CHECK(from_file.out == builtin.out);

  const std::string bad = artifact("bad_geometry.json");
  {
    std::ofstream out(bad);
    out << "{\"L1\": 0.05}";
  }
  const CliResult rejected = run_cli("validate --geometry " + bad);
  CHECK(rejected.exit_code == 1);
  CHECK(rejected.err.rfind("error: ", 0) == 0);

  const CliResult with_urdf =
      run_cli("validate --urdf " +
              lips::testing::data_path("urdf/ankle_valid.urdf"));
  CHECK(with_urdf.exit_code == 0);
  CHECK(with_urdf.out.find("\"links\":3") != std::string::npos);
  CHECK(with_urdf.out.find("\"joints\":2") != std::string::npos);
}

TEST_CASE("an unreachable reference terminates early instead of failing") {
  const CliResult result =
      run_cli("simulate --duration 5 --amplitude 0,1.4 --noise-sigma 2e-3");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("\"terminated_early\":true") != std::string::npos);
}

TEST_CASE("failed runs leave no artifacts behind") {
  const std::string bad = artifact("broken_geometry.json");
  {
    std::ofstream out(bad);
    out << "{\"L1\": 0.05,";
  }
  const std::string csv = artifact("never_written.csv");
  std::filesystem::remove(csv);
  const CliResult result = run_cli("simulate --geometry " + bad +
                                   " --duration 1 --csv " + csv);
  CHECK(result.exit_code == 1);
  CHECK(!std::filesystem::exists(csv));
}
