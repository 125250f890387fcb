#include "evade/avoidance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace evade {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Safety pipeline for an already-planned trajectory, with per-stage timing.
void run_pipeline(const Trajectory& traj, const PointCloud& cloud,
                  const ReplanConfig& cfg, CheckContext context,
                  SafetyReport& report, StageTimes& times) {
  auto t0 = Clock::now();
  const Aabb box = crop_box(traj, cfg.clearance);
  times.aabb += seconds_since(t0);

  t0 = Clock::now();
  const CroppedCloud cropped =
      split_cropped(cloud, crop_cloud(cloud, box, traj.duration));
  times.crop += seconds_since(t0);

  t0 = Clock::now();
  const auto samples = sample_constant_distance(traj, cfg.dp);
  times.rollout += seconds_since(t0);

  t0 = Clock::now();
  auto verdicts = classify_samples(samples, cropped, cfg.clearance, cfg.sensor,
                                   cloud.sensor_origin, traj.duration);
  report = classify_trajectory(std::move(verdicts), context);
  times.check += seconds_since(t0);
}

}  // namespace

StageTimes& StageTimes::operator+=(const StageTimes& o) {
  generation += o.generation;
  aabb += o.aabb;
  crop += o.crop;
  rollout += o.rollout;
  check += o.check;
  return *this;
}

bool SpheroidParams::valid() const {
  if (radii.empty() || points_per_shell < 1 || !(flattening > 0.0) ||
      flattening > 1.0) {
    return false;
  }
  double prev = 0.0;
  for (double r : radii) {
    if (!(r > prev)) {
      return false;
    }
    prev = r;
  }
  return true;
}

bool TubeParams::valid() const {
  if (radii.empty() || rings < 1 || points_per_ring < 1) {
    return false;
  }
  double prev = 0.0;
  for (double r : radii) {
    if (!(r > prev)) {
      return false;
    }
    prev = r;
  }
  return true;
}

std::vector<WaypointCandidate> spheroid_waypoints(const State3& center,
                                                  const SpheroidParams& params) {
  if (!params.valid()) {
    throw std::invalid_argument("invalid spheroid parameters");
  }
  const Vec3 c = center.pos();
  std::vector<WaypointCandidate> out;
  out.reserve(params.radii.size() * params.points_per_shell);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (std::size_t shell = 0; shell < params.radii.size(); ++shell) {
    const double radius = params.radii[shell];
    const int n = params.points_per_shell;
    for (int i = 0; i < n; ++i) {
      // Fibonacci lattice on the unit sphere, flattened along z.
      const double zu = 1.0 - 2.0 * (i + 0.5) / n;
      const double ru = std::sqrt(std::max(0.0, 1.0 - zu * zu));
      const double phi = 2.0 * M_PI * i / golden;
      WaypointCandidate wp;
      wp.position = c + Vec3{radius * ru * std::cos(phi),
                             radius * ru * std::sin(phi),
                             params.flattening * radius * zu};
      wp.source = WaypointCandidate::Source::kSpheroid;
      wp.shell = static_cast<int>(shell);
      wp.index = i;
      out.push_back(wp);
    }
  }
  return out;
}

std::vector<WaypointCandidate> tube_waypoints(const Trajectory& original,
                                              const TubeParams& params) {
  if (!params.valid()) {
    throw std::invalid_argument("invalid tube parameters");
  }
  if (!(original.duration > 0.0)) {
    throw std::invalid_argument("tube_waypoints: trajectory has zero duration");
  }
  std::vector<WaypointCandidate> out;
  out.reserve(params.radii.size() * params.rings * params.points_per_ring);
  for (std::size_t ri = 0; ri < params.radii.size(); ++ri) {
    const double radius = params.radii[ri];
    for (int ring = 1; ring <= params.rings; ++ring) {
      const double t = original.duration * ring / (params.rings + 1);
      const State3 s = original.eval(t);
      Vec3 normal = s.vel();
      if (normal.norm() < 1e-6) {
        normal = Vec3{0.0, 0.0, 1.0};  // hover: ring in the horizontal plane
      }
      normal = normal.normalized();
      Vec3 e1 = normal.cross(Vec3{0.0, 0.0, 1.0});
      if (e1.norm() < 1e-9) {
        e1 = normal.cross(Vec3{1.0, 0.0, 0.0});
      }
      e1 = e1.normalized();
      const Vec3 e2 = normal.cross(e1).normalized();
      for (int j = 0; j < params.points_per_ring; ++j) {
        const double ang = 2.0 * M_PI * j / params.points_per_ring;
        WaypointCandidate wp;
        wp.position =
            s.pos() + radius * (std::cos(ang) * e1 + std::sin(ang) * e2);
        wp.source = WaypointCandidate::Source::kTube;
        wp.shell = static_cast<int>(ri) * params.rings + (ring - 1);
        wp.index = j;
        out.push_back(wp);
      }
    }
  }
  return out;
}

CandidateResult validate_candidate(const State3& start,
                                   const WaypointCandidate& wp,
                                   const PointCloud& cloud,
                                   const Constraints3& constraints,
                                   const ReplanConfig& cfg) {
  CandidateResult res;
  res.waypoint = wp;
  const auto t0 = Clock::now();
  try {
    res.trajectory =
        plan_3d(start, State3::at_rest(wp.position, start.timestamp), constraints);
    res.planned = true;
  } catch (const PlanError& err) {
    res.discard_reason = err.what();
    res.times.generation = seconds_since(t0);
    return res;
  }
  res.times.generation = seconds_since(t0);
  run_pipeline(res.trajectory, cloud, cfg, CheckContext::kCandidate, res.report,
               res.times);
  return res;
}

std::size_t select_best(const std::vector<CandidateResult>& safe,
                        const Vec3& commanded_wp, const SelectionState& sel) {
  if (safe.empty()) {
    throw std::invalid_argument("select_best: empty safe set");
  }
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < safe.size(); ++i) {
    const Vec3& p = safe[i].waypoint.position;
    const double to_goal = (p - commanded_wp).norm();
    double cost;
    if (sel.previous_waypoint) {
      cost = sel.alpha * to_goal +
             (1.0 - sel.alpha) * (p - *sel.previous_waypoint).norm();
    } else {
      cost = to_goal;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  return best;
}

namespace {

void validate_block(const State3& state,
                    const std::vector<WaypointCandidate>& wps,
                    std::size_t begin, std::size_t end, const PointCloud& cloud,
                    const Constraints3& constraints, const ReplanConfig& cfg,
                    std::vector<CandidateResult>& results) {
  const std::size_t nthreads =
      std::max<std::size_t>(1, std::min<std::size_t>(cfg.threads, end - begin));
  if (nthreads == 1) {
    for (std::size_t i = begin; i < end; ++i) {
      results[i] = validate_candidate(state, wps[i], cloud, constraints, cfg);
    }
    return;
  }
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < nthreads; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = begin + w; i < end; i += nthreads) {
        results[i] = validate_candidate(state, wps[i], cloud, constraints, cfg);
      }
    });
  }
  for (auto& t : workers) {
    t.join();
  }
}

}  // namespace

ReplanDecision replan_step(const PointCloud& cloud,
                           const std::optional<Trajectory>& current,
                           const Vec3& commanded_wp, const State3& state,
                           const Constraints3& constraints, SelectionState& sel,
                           const ReplanConfig& cfg) {
  const auto deadline = Clock::now() + std::chrono::duration<double>(cfg.budget_s);
  ReplanDecision dec;

  const bool current_is_nominal =
      current && (current->target.pos() - commanded_wp).norm() < 1e-9;

  if (current_is_nominal) {
    SafetyReport rep;
    run_pipeline(*current, cloud, cfg, CheckContext::kExecuting, rep, dec.times);
    if (rep.safe) {
      dec.action = ReplanDecision::Action::kKeepCurrent;
      dec.trajectory = *current;
      sel.previous_waypoint.reset();
      return dec;
    }
  }

  // Not flying to the commanded waypoint (or that trajectory went unsafe):
  // try a fresh nominal trajectory first.
  std::optional<Trajectory> nominal;
  if (!current_is_nominal) {
    const auto t0 = Clock::now();
    try {
      nominal =
          plan_3d(state, State3::at_rest(commanded_wp, state.timestamp), constraints);
      dec.times.generation += seconds_since(t0);
      SafetyReport rep;
      run_pipeline(*nominal, cloud, cfg, CheckContext::kCandidate, rep, dec.times);
      if (rep.safe) {
        dec.action = ReplanDecision::Action::kSwitchNominal;
        dec.trajectory = *nominal;
        sel.previous_waypoint.reset();
        return dec;
      }
    } catch (const PlanError&) {
      dec.times.generation += seconds_since(t0);
    }
    if (current) {
      SafetyReport rep;
      run_pipeline(*current, cloud, cfg, CheckContext::kExecuting, rep, dec.times);
      if (rep.safe) {
        dec.action = ReplanDecision::Action::kKeepCurrent;
        dec.trajectory = *current;
        return dec;
      }
    }
  } else {
    nominal = current;
  }

  // Current course is unsafe: search alternatives, goal-pursuing tube
  // candidates first.
  dec.replanned = true;
  std::vector<WaypointCandidate> wps;
  if (nominal && nominal->duration > 0.0) {
    wps = tube_waypoints(*nominal, cfg.tube);
  }
  const auto spheroids = spheroid_waypoints(state, cfg.spheroid);
  wps.insert(wps.end(), spheroids.begin(), spheroids.end());
  if (!cfg.adaptive && static_cast<int>(wps.size()) > cfg.max_candidates) {
    wps.resize(cfg.max_candidates);
  }

  std::vector<CandidateResult> results(wps.size());
  std::size_t processed = 0;
  const std::size_t block = std::max<std::size_t>(1, cfg.threads);
  while (processed < wps.size()) {
    if (cfg.adaptive && processed > 0 && Clock::now() >= deadline) {
      break;
    }
    const std::size_t end = std::min(wps.size(), processed + block);
    validate_block(state, wps, processed, end, cloud, constraints, cfg, results);
    processed = end;
  }
  results.resize(processed);
  dec.candidates_considered = processed;
  for (const auto& r : results) {
    dec.times += r.times;
  }

  std::vector<CandidateResult> safe;
  for (auto& r : results) {
    if (r.planned && r.report.safe) {
      safe.push_back(r);
    }
  }
  dec.candidates_safe = safe.size();

  if (!safe.empty()) {
    const std::size_t best = select_best(safe, commanded_wp, sel);
    dec.action = ReplanDecision::Action::kSwitchAlternative;
    dec.trajectory = safe[best].trajectory;
    dec.waypoint = safe[best].waypoint;
    sel.previous_waypoint = safe[best].waypoint.position;
    return dec;
  }

  // No safe candidate: least-bad fallback, fewest collision samples first,
  // then the latest first collision.
  dec.action = ReplanDecision::Action::kEmergency;
  const CandidateResult* least_bad = nullptr;
  auto badness = [](const CandidateResult& r) {
    std::size_t collisions = 0;
    double first_collision = std::numeric_limits<double>::infinity();
    for (const auto& v : r.report.verdicts) {
      if (v.cls == SampleClass::kCollide) {
        ++collisions;
        first_collision =
            std::min(first_collision, static_cast<double>(v.sample_index));
      }
    }
    return std::make_pair(collisions, -first_collision);
  };
  for (const auto& r : results) {
    if (!r.planned) {
      continue;
    }
    if (!least_bad || badness(r) < badness(*least_bad)) {
      least_bad = &r;
    }
  }
  if (least_bad) {
    dec.trajectory = least_bad->trajectory;
    dec.waypoint = least_bad->waypoint;
    sel.previous_waypoint = least_bad->waypoint.position;
  } else {
    // Nothing planned at all: brake toward a stop at the current position.
    dec.trajectory =
        plan_3d(state, State3::at_rest(state.pos(), state.timestamp), constraints);
  }
  return dec;
}

}  // namespace evade
