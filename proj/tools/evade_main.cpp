#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "evade/io.hpp"
#include "evade/kernels.hpp"

namespace {

using namespace evade;

Vec3 parse_triplet(const std::string& s, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    vals.push_back(std::stod(tok));
  }
  if (vals.size() == 1) {
    return {vals[0], vals[0], vals[0]};
  }
  if (vals.size() == 3) {
    return {vals[0], vals[1], vals[2]};
  }
  throw CLI::ValidationError(what, "expected 1 or 3 comma-separated values");
}

struct TrajFlags {
  std::string start_p = "0,0,0", start_v = "0,0,0", start_a = "0,0,0";
  std::string goal_p = "0,0,0", goal_v = "0,0,0", goal_a = "0,0,0";
  std::string vmin = "-5", vmax = "5", amin = "-5", amax = "5";
  std::string jmin = "-20", jmax = "20";

  void add(CLI::App* cmd) {
    cmd->add_option("--start-p", start_p, "start position x,y,z [m]");
    cmd->add_option("--start-v", start_v, "start velocity x,y,z [m/s]");
    cmd->add_option("--start-a", start_a, "start acceleration x,y,z [m/s^2]");
    cmd->add_option("--goal-p", goal_p, "target position x,y,z [m]");
    cmd->add_option("--goal-v", goal_v, "target velocity x,y,z [m/s]");
    cmd->add_option("--goal-a", goal_a, "target acceleration x,y,z [m/s^2]");
    cmd->add_option("--vmin", vmin, "velocity lower bound (1 or 3 values)");
    cmd->add_option("--vmax", vmax, "velocity upper bound");
    cmd->add_option("--amin", amin, "acceleration lower bound");
    cmd->add_option("--amax", amax, "acceleration upper bound");
    cmd->add_option("--jmin", jmin, "jerk lower bound");
    cmd->add_option("--jmax", jmax, "jerk upper bound");
  }

  State3 start() const {
    State3 s = State3::at_rest(parse_triplet(start_p, "--start-p"));
    const Vec3 v = parse_triplet(start_v, "--start-v");
    const Vec3 a = parse_triplet(start_a, "--start-a");
    for (std::size_t i = 0; i < 3; ++i) {
      s.axis(i).v = v[i];
      s.axis(i).a = a[i];
    }
    return s;
  }

  State3 goal() const {
    State3 s = State3::at_rest(parse_triplet(goal_p, "--goal-p"));
    const Vec3 v = parse_triplet(goal_v, "--goal-v");
    const Vec3 a = parse_triplet(goal_a, "--goal-a");
    for (std::size_t i = 0; i < 3; ++i) {
      s.axis(i).v = v[i];
      s.axis(i).a = a[i];
    }
    return s;
  }

  Constraints3 constraints() const {
    const Vec3 vn = parse_triplet(vmin, "--vmin"), vx = parse_triplet(vmax, "--vmax");
    const Vec3 an = parse_triplet(amin, "--amin"), ax = parse_triplet(amax, "--amax");
    const Vec3 jn = parse_triplet(jmin, "--jmin"), jx = parse_triplet(jmax, "--jmax");
    Constraints3 c;
    for (std::size_t i = 0; i < 3; ++i) {
      c[i] = {vn[i], vx[i], an[i], ax[i], jn[i], jx[i]};
    }
    return c;
  }
};

// Defaults from the optional config file named by EVADE_CONFIG.
void apply_env_config(ClearanceSpec& clearance, SensorModel& sensor, Vec3& dp) {
  const char* path = std::getenv("EVADE_CONFIG");
  if (!path || !*path) {
    return;
  }
  const io::KvDoc doc = io::KvDoc::parse_file(path);
  if (doc.has("clearance.l_coll")) {
    clearance.l_coll = doc.get_vec3("clearance.l_coll");
  }
  if (doc.has("clearance.l_warn")) {
    clearance.l_warn = doc.get_vec3("clearance.l_warn");
  }
  if (doc.has("sensor.theta_deg")) {
    sensor.theta_lidar = doc.get_double("sensor.theta_deg") * M_PI / 180.0;
  }
  if (doc.has("sensor.range")) {
    sensor.l_lidar = doc.get_double("sensor.range");
  }
  if (doc.has("sensor.body_radius")) {
    sensor.mav_body_radius = doc.get_double("sensor.body_radius");
  }
  if (doc.has("replan.dp")) {
    dp = doc.get_vec3("replan.dp");
  }
}

PointCloud synthetic_cloud(std::size_t n, double cube, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-cube / 2.0, cube / 2.0);
  PointCloud cloud;
  cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.add({{u(rng), u(rng), u(rng)}, {}});
  }
  return cloud;
}

struct StageStats {
  std::vector<double> us;

  void add(double seconds) { us.push_back(seconds * 1e6); }
  double mean() const {
    double s = 0.0;
    for (double v : us) s += v;
    return us.empty() ? 0.0 : s / us.size();
  }
  double quantile(double q) const {
    if (us.empty()) return 0.0;
    std::vector<double> v = us;
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(q * (v.size() - 1));
    return v[idx];
  }
};

int cmd_bench(std::size_t cloud_size, int candidates, int reps,
              std::uint64_t seed, int threads) {
  const PointCloud cloud = synthetic_cloud(cloud_size, 100.0, seed);

  ReplanConfig cfg;
  cfg.threads = threads;
  const Constraints3 limits =
      uniform_constraints({-5.0, 5.0, -5.0, 5.0, -20.0, 20.0});
  const State3 start = State3::at_rest({0.0, 0.0, 0.0});
  const Trajectory nominal =
      plan_3d(start, State3::at_rest({5.0, 0.0, 0.0}), limits);

  std::vector<WaypointCandidate> wps = tube_waypoints(nominal, cfg.tube);
  const auto sph = spheroid_waypoints(start, cfg.spheroid);
  wps.insert(wps.end(), sph.begin(), sph.end());

  StageStats gen, aabb, crop, rollout, check, total;
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < candidates; ++i) {
      const auto res = validate_candidate(start, wps[i % wps.size()], cloud,
                                          limits, cfg);
      gen.add(res.times.generation);
      aabb.add(res.times.aabb);
      crop.add(res.times.crop);
      rollout.add(res.times.rollout);
      check.add(res.times.check);
      total.add(res.times.total());
    }
  }

  // Cropping ablation: collision-checking stage with and without the AABB
  // subset, same trajectory and cloud.
  using Clock = std::chrono::steady_clock;
  auto time_check = [&](bool use_crop) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(3, reps); ++r) {
      const auto t0 = Clock::now();
      check_trajectory(nominal, cloud, cfg.clearance, cfg.sensor, cfg.dp,
                       CheckContext::kCandidate, use_crop);
      best = std::min(best,
                      std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best * 1e6;
  };
  const double with_crop_us = time_check(true);
  const double without_crop_us = time_check(false);

  io::KvDoc doc;
  auto stage = [&](const std::string& name, const StageStats& s) {
    doc.set_double("stage." + name + ".mean_us", s.mean());
    doc.set_double("stage." + name + ".median_us", s.quantile(0.5));
    doc.set_double("stage." + name + ".p99_us", s.quantile(0.99));
  };
  stage("generation", gen);
  stage("aabb", aabb);
  stage("crop", crop);
  stage("rollout", rollout);
  stage("check", check);
  stage("total", total);
  doc.set_double("ablation.check_with_crop_us", with_crop_us);
  doc.set_double("ablation.check_without_crop_us", without_crop_us);
  doc.set_double("ablation.speedup", without_crop_us / with_crop_us);
  doc.set_double("budget.candidates_per_50ms",
                 total.mean() > 0.0 ? std::floor(50000.0 / total.mean()) : 0.0);
  doc.set_double("threads", threads);
  doc.set("kernel_backend", kernels::backend_name());
  std::cout << doc.to_string();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jerk-limited trajectory planning and obstacle avoidance"};
  app.require_subcommand(1);

  TrajFlags plan_flags, check_flags;
  double dp_scalar = 0.1;
  double dt = 0.0;
  std::string cloud_path, verdict_path, scenario_path, out_dir = "sim_out";
  std::string lcoll = "0.8", lwarn = "1.3";
  double theta_deg = 33.2, range = 120.0, body_radius = 0.5;
  double alpha = 0.5, budget_ms = 50.0;
  int candidates = 64, reps = 5, threads = 1;
  std::uint64_t seed = 1;
  std::size_t cloud_size = 65536;
  std::string backend = "auto";

  auto* plan = app.add_subcommand("plan", "plan a trajectory, print sample CSV");
  plan_flags.add(plan);
  plan->add_option("--dp", dp_scalar, "constant-distance sampling step [m]");
  plan->add_option("--dt", dt, "constant-time sampling step [s] (overrides --dp)");

  auto* check = app.add_subcommand("check", "check a trajectory against a cloud");
  check_flags.add(check);
  check->add_option("--cloud", cloud_path, "cloud file")->required();
  check->add_option("--dp", dp_scalar, "sampling step [m]");
  check->add_option("--lcoll", lcoll, "collision half-extent (1 or 3 values)");
  check->add_option("--lwarn", lwarn, "warning half-extent (1 or 3 values)");
  check->add_option("--theta-deg", theta_deg, "lidar opening angle [deg]");
  check->add_option("--range", range, "lidar range [m]");
  check->add_option("--body-radius", body_radius, "MAV body radius [m]");
  check->add_option("--verdicts-out", verdict_path, "per-sample verdict CSV file");

  auto* sim = app.add_subcommand("sim", "run a closed-loop scenario");
  sim->add_option("scenario", scenario_path, "scenario file")->required();
  sim->add_option("--out", out_dir, "output directory");

  auto* bench = app.add_subcommand("bench", "stage timing benchmark");
  bench->add_option("--cloud-size", cloud_size, "synthetic cloud point count");
  bench->add_option("--candidates", candidates, "candidates per repetition");
  bench->add_option("--reps", reps, "repetitions");
  bench->add_option("--seed", seed, "cloud seed");

  app.add_option("--threads", threads, "worker threads for candidate validation");
  app.add_option("--alpha", alpha, "waypoint cost blend weight");
  app.add_option("--budget-ms", budget_ms, "replanning budget [ms]");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--kernels", backend, "kernel backend: auto|scalar|avx2|neon");

  CLI11_PARSE(app, argc, argv);

  if (backend == "scalar") {
    kernels::set_backend(kernels::Backend::kScalar);
  } else if (backend == "avx2") {
    kernels::set_backend(kernels::Backend::kAvx2);
  } else if (backend == "neon") {
    kernels::set_backend(kernels::Backend::kNeon);
  }

  try {
    if (plan->parsed()) {
      const Trajectory traj =
          plan_3d(plan_flags.start(), plan_flags.goal(), plan_flags.constraints());
      const auto samples =
          dt > 0.0 ? sample_constant_time(traj, dt)
                   : sample_constant_distance(
                         traj, {dp_scalar, dp_scalar, dp_scalar});
      io::write_trajectory_csv(std::cout, samples);
      return 0;
    }
    if (check->parsed()) {
      ClearanceSpec clearance{parse_triplet(lcoll, "--lcoll"),
                              parse_triplet(lwarn, "--lwarn")};
      SensorModel sensor;
      sensor.theta_lidar = theta_deg * M_PI / 180.0;
      sensor.l_lidar = range;
      sensor.mav_body_radius = body_radius;
      Vec3 dp{dp_scalar, dp_scalar, dp_scalar};
      apply_env_config(clearance, sensor, dp);
      if (!clearance.valid()) {
        throw io::ParseError("invalid clearance (need 0 < l_coll < l_warn)");
      }

      const Trajectory traj = plan_3d(check_flags.start(), check_flags.goal(),
                                      check_flags.constraints());
      const PointCloud cloud = io::read_cloud_file(cloud_path);
      const Aabb box = crop_box(traj, clearance);
      const auto cropped =
          split_cropped(cloud, crop_cloud(cloud, box, traj.duration));
      const auto samples = sample_constant_distance(traj, dp);
      auto verdicts = classify_samples(samples, cropped, clearance, sensor,
                                       cloud.sensor_origin, traj.duration);
      const SafetyReport report =
          classify_trajectory(std::move(verdicts), CheckContext::kCandidate);
      io::write_report_kv(std::cout, report);
      if (!verdict_path.empty()) {
        std::ofstream vout(verdict_path);
        io::write_verdict_csv(vout, samples, report);
      }
      return report.safe ? 0 : 2;
    }
    if (sim->parsed()) {
      Scenario scn = io::read_scenario_file(scenario_path);
      if (app.count("--alpha")) {
        scn.selection.alpha = alpha;
      }
      if (app.count("--budget-ms")) {
        scn.replan.budget_s = budget_ms / 1000.0;
      }
      if (app.count("--threads")) {
        scn.replan.threads = threads;
      }
      if (app.count("--seed")) {
        scn.seed = seed;
      }
      const SimLog log = run(scn);
      io::write_sim_log(out_dir, log);
      std::cout << "termination = " << log.termination << "\n"
                << "steps = " << log.steps.size() << "\n";
      return log.collision ? 2 : 0;
    }
    if (bench->parsed()) {
      return cmd_bench(cloud_size, candidates, reps, seed, threads);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
