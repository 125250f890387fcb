#include "evade/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace evade {
namespace {

// Deterministic surface sampling of an axis-aligned box: per-face counts
// proportional to area, stratified by a seeded generator.
std::vector<Vec3> sample_box_surface(const BoxObstacle& box, double density,
                                     std::mt19937_64& rng) {
  std::vector<Vec3> pts;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double ex = 2.0 * box.half.x;
  const double ey = 2.0 * box.half.y;
  const double ez = 2.0 * box.half.z;
  struct Face {
    int axis;
    double sign;
    double area;
  };
  const Face faces[6] = {{0, 1.0, ey * ez}, {0, -1.0, ey * ez},
                         {1, 1.0, ex * ez}, {1, -1.0, ex * ez},
                         {2, 1.0, ex * ey}, {2, -1.0, ex * ey}};
  for (const Face& f : faces) {
    const auto count = static_cast<std::size_t>(std::llround(density * f.area));
    for (std::size_t i = 0; i < count; ++i) {
      Vec3 p;
      p[f.axis] = f.sign * box.half[f.axis];
      const int a1 = (f.axis + 1) % 3;
      const int a2 = (f.axis + 2) % 3;
      p[a1] = (u(rng) * 2.0 - 1.0) * box.half[a1];
      p[a2] = (u(rng) * 2.0 - 1.0) * box.half[a2];
      pts.push_back(box.center + p);
    }
  }
  return pts;
}

std::vector<Vec3> sample_sphere_surface(double radius, double density,
                                        std::mt19937_64& rng) {
  const double area = 4.0 * M_PI * radius * radius;
  const auto count =
      std::max<std::size_t>(4, static_cast<std::size_t>(std::llround(density * area)));
  std::vector<Vec3> pts;
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 d{g(rng), g(rng), g(rng)};
    const double n = d.norm();
    if (n < 1e-12) {
      d = Vec3{1.0, 0.0, 0.0};
    } else {
      d = d / n;
    }
    pts.push_back(d * radius);
  }
  return pts;
}

double box_surface_distance(const Vec3& p, const BoxObstacle& box) {
  Vec3 d;
  bool inside = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const double off = p[i] - box.center[i];
    const double excess = std::abs(off) - box.half[i];
    d[i] = std::max(excess, 0.0);
    inside = inside && excess <= 0.0;
  }
  if (!inside) {
    return d.norm();
  }
  double depth = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) {
    depth = std::min(depth, box.half[i] - std::abs(p[i] - box.center[i]));
  }
  return -depth;
}

}  // namespace

World::World(const Scenario& scn) : scn_(&scn) {
  std::mt19937_64 rng(scn.seed);
  for (const BoxObstacle& b : scn.boxes) {
    box_points_.push_back(sample_box_surface(b, b.density, rng));
  }
  for (std::size_t i = 0; i < scn.balls.size(); ++i) {
    BallPoints bp;
    bp.local = sample_sphere_surface(scn.balls[i].radius, scn.balls[i].density, rng);
    bp.obstacle = i;
    ball_points_.push_back(std::move(bp));
  }
}

double World::surface_distance(const Vec3& p, double t) const {
  double best = std::numeric_limits<double>::infinity();
  for (const BoxObstacle& b : scn_->boxes) {
    best = std::min(best, box_surface_distance(p, b));
  }
  for (const BallObstacle& b : scn_->balls) {
    if (t < b.spawn_time) {
      continue;
    }
    const Vec3 c = b.center + b.velocity * (t - b.spawn_time);
    best = std::min(best, (p - c).norm() - b.radius);
  }
  for (const PointsObstacle& ps : scn_->point_sets) {
    for (const Vec3& q : ps.points) {
      best = std::min(best, (p - q).norm());
    }
  }
  return best;
}

PointCloud World::scan(const State3& mav, double t) const {
  PointCloud cloud;
  cloud.sensor_origin = mav.pos();
  cloud.stamp = t;
  const Vec3 origin = mav.pos();
  auto visible = [&](const Vec3& p) {
    return coverage_class(p, scn_->sensor, origin) == CoverageClass::kObservable;
  };
  for (const auto& pts : box_points_) {
    for (const Vec3& p : pts) {
      if (visible(p)) {
        cloud.add({p, Vec3{}});
      }
    }
  }
  for (const auto& bp : ball_points_) {
    const BallObstacle& b = scn_->balls[bp.obstacle];
    if (t < b.spawn_time) {
      continue;
    }
    const Vec3 c = b.center + b.velocity * (t - b.spawn_time);
    for (const Vec3& local : bp.local) {
      const Vec3 p = c + local;
      if (visible(p)) {
        cloud.add({p, b.velocity});
      }
    }
  }
  for (const auto& ps : scn_->point_sets) {
    for (const Vec3& p : ps.points) {
      if (visible(p)) {
        cloud.add({p, Vec3{}});
      }
    }
  }
  return cloud;
}

PointCloud synth_scan(const World& world, const State3& mav, double t) {
  return world.scan(mav, t);
}

SimLog run(const Scenario& scenario) {
  World world(scenario);
  SimLog log;
  const double dt = 1.0 / scenario.loop_rate_hz;
  const double coll_bound =
      std::min({scenario.replan.clearance.l_coll.x,
                scenario.replan.clearance.l_coll.y,
                scenario.replan.clearance.l_coll.z});

  State3 state = scenario.start;
  SelectionState sel = scenario.selection;
  std::optional<Trajectory> active;
  double active_elapsed = 0.0;
  std::size_t wp_index = 0;

  for (double t = 0.0; t <= scenario.max_time_s + 1e-9; t += dt) {
    state.timestamp = t;
    const Vec3 goal = scenario.waypoints[wp_index];

    SimStep step;
    step.t = t;
    step.state = state;
    step.min_obstacle_dist = world.surface_distance(state.pos(), t);
    log.min_clearance = std::min(log.min_clearance, step.min_obstacle_dist);

    if (step.min_obstacle_dist < coll_bound) {
      log.collision = true;
      log.termination = "collision";
      log.steps.push_back(step);
      break;
    }

    const PointCloud cloud = world.scan(state, t);
    std::optional<Trajectory> current_tail;
    if (active) {
      current_tail = active->tail(std::min(active_elapsed, active->duration));
    }
    ReplanDecision dec =
        replan_step(cloud, current_tail, goal, state, scenario.constraints, sel,
                    scenario.replan);
    step.decision = static_cast<int>(dec.action);
    step.candidates = dec.candidates_considered;
    step.times = dec.times;
    if (dec.waypoint) {
      step.selected_wp = dec.waypoint->position;
    } else {
      step.selected_wp = dec.trajectory.target.pos();
    }
    if (dec.replanned) {
      ++log.replan_count;
    }
    if (dec.action == ReplanDecision::Action::kKeepCurrent && active) {
      active_elapsed += dt;
    } else {
      active = dec.trajectory;
      active_elapsed = dt;
    }
    log.steps.push_back(step);

    // Perfect tracking along the active trajectory.
    state = active->eval(std::min(active_elapsed, active->duration));
    state.timestamp = t + dt;

    const bool at_goal = (state.pos() - goal).norm() < scenario.goal_pos_tol &&
                         state.vel().norm() < scenario.goal_vel_tol;
    if (at_goal) {
      if (wp_index + 1 < scenario.waypoints.size()) {
        ++wp_index;
        active.reset();
      } else {
        log.goal_reached = true;
        log.termination = "goal";
        break;
      }
    }
  }
  if (log.termination.empty()) {
    log.termination = "timeout";
  }
  log.total_time = log.steps.empty() ? 0.0 : log.steps.back().t;
  return log;
}

}  // namespace evade
