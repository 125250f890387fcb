#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

std::string bin() {
  const char* p = std::getenv("EVADE_BIN");
  REQUIRE(p != nullptr);
  return p;
}

std::string src() {
  const char* p = std::getenv("EVADE_SRC");
  REQUIRE(p != nullptr);
  return p;
}

CmdResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + bin() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) {
    res.output += buf.data();
  }
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("plan prints a sample csv that reaches the goal") {
  const CmdResult res = run_cli("plan --goal-p 5,0,0 --dp 0.5");
  CHECK(res.exit_code == 0);
  REQUIRE(contains(res.output, "t,px,py,pz"));
  // Last data row: position x should be the 5 m goal.
  const auto last_nl = res.output.find_last_of('\n', res.output.size() - 2);
  const std::string last = res.output.substr(last_nl + 1);
  const auto comma = last.find(',');
  const double px = std::stod(last.substr(comma + 1));
  CHECK(px == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("plan supports constant-time sampling") {
  const CmdResult res = run_cli("plan --goal-p 1,0,0 --dt 0.25");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "\n0.25,"));
}

TEST_CASE("plan rejects infeasible boundary states") {
  const CmdResult res = run_cli("plan --goal-p 1,0,0 --start-v 9,0,0 --vmax 5");
  CHECK(res.exit_code == 1);
  CHECK(contains(res.output, "error:"));
}

TEST_CASE("check returns 0 for a safe cloud and 2 for an obstructed one") {
  write_file("/tmp/evade_cli_far.cloud", "count 1\n0 30 0\n");
  const CmdResult safe =
      run_cli("check --goal-p 5,0,0 --cloud /tmp/evade_cli_far.cloud");
  CHECK(safe.exit_code == 0);
  CHECK(contains(safe.output, "verdict = safe"));

  write_file("/tmp/evade_cli_near.cloud", "count 1\n2.5 0 0\n");
  const CmdResult blocked =
      run_cli("check --goal-p 5,0,0 --cloud /tmp/evade_cli_near.cloud "
              "--verdicts-out /tmp/evade_cli_verdicts.csv");
  CHECK(blocked.exit_code == 2);
  CHECK(contains(blocked.output, "verdict = replan"));
  std::ifstream verdicts("/tmp/evade_cli_verdicts.csv");
  CHECK(verdicts.good());
}

TEST_CASE("check fails cleanly on a missing cloud file") {
  const CmdResult res = run_cli("check --cloud /tmp/no_such_file.cloud");
  CHECK(res.exit_code == 1);
  CHECK(contains(res.output, "error:"));
}

TEST_CASE("EVADE_CONFIG overrides clearance defaults") {
  // A point 2 m off the path is safe with defaults but inside an enlarged
  // warning zone that never clears.
  write_file("/tmp/evade_cli_side.cloud", "count 1\n2.5 2 0\n");
  write_file("/tmp/evade_cli.conf",
             "clearance.l_coll = 2.2 2.2 2.2\n"
             "clearance.l_warn = 3 3 3\n");
  const CmdResult plain =
      run_cli("check --goal-p 5,0,0 --cloud /tmp/evade_cli_side.cloud");
  CHECK(plain.exit_code == 0);
  const CmdResult configured =
      run_cli("check --goal-p 5,0,0 --cloud /tmp/evade_cli_side.cloud",
              "EVADE_CONFIG=/tmp/evade_cli.conf");
  CHECK(configured.exit_code == 2);

  write_file("/tmp/evade_cli_bad.conf",
             "clearance.l_coll = 3 3 3\nclearance.l_warn = 1 1 1\n");
  const CmdResult bad =
      run_cli("check --goal-p 5,0,0 --cloud /tmp/evade_cli_side.cloud",
              "EVADE_CONFIG=/tmp/evade_cli_bad.conf");
  CHECK(bad.exit_code == 1);
  CHECK(contains(bad.output, "invalid clearance"));
}

TEST_CASE("sim runs a scenario file and writes logs") {
  const CmdResult res = run_cli("sim " + src() +
                                "/scenarios/empty.scn --out /tmp/evade_cli_sim");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "termination = goal"));
  std::ifstream summary("/tmp/evade_cli_sim/summary.kv");
  CHECK(summary.good());
}

TEST_CASE("sim reports a missing scenario file as an error") {
  const CmdResult res = run_cli("sim /tmp/no_such.scn");
  CHECK(res.exit_code == 1);
  CHECK(contains(res.output, "error:"));
}

TEST_CASE("bench emits stage and ablation statistics") {
  const CmdResult res =
      run_cli("bench --cloud-size 2000 --candidates 6 --reps 1");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "stage.total.mean_us"));
  CHECK(contains(res.output, "stage.check.p99_us"));
  CHECK(contains(res.output, "ablation.speedup"));
  CHECK(contains(res.output, "budget.candidates_per_50ms"));
  CHECK(contains(res.output, "kernel_backend"));
}

TEST_CASE("kernel backend can be forced to scalar") {
  const CmdResult res = run_cli(
      "--kernels scalar bench --cloud-size 500 --candidates 2 --reps 1");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "kernel_backend = scalar"));
}

TEST_CASE("missing subcommand is an error") {
  const CmdResult res = run_cli("");
  CHECK(res.exit_code != 0);
}
