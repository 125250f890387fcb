#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evade/avoidance.hpp"

namespace evade {

struct BoxObstacle {
  Vec3 center;
  Vec3 half{0.5, 0.5, 0.5};
  double density = 20.0;  // surface points per square meter
};

struct BallObstacle {
  Vec3 center;       // at spawn time
  double radius = 0.3;
  Vec3 velocity;
  double spawn_time = 0.0;
  double density = 50.0;
};

struct PointsObstacle {
  std::vector<Vec3> points;
};

struct Scenario {
  std::string name;
  State3 start;
  std::vector<Vec3> waypoints;  // commanded, visited in order
  Constraints3 constraints;
  std::vector<BoxObstacle> boxes;
  std::vector<BallObstacle> balls;
  std::vector<PointsObstacle> point_sets;
  SensorModel sensor;
  ReplanConfig replan;
  SelectionState selection;
  double loop_rate_hz = 20.0;
  double max_time_s = 60.0;
  double goal_pos_tol = 0.1;
  double goal_vel_tol = 0.05;
  std::uint64_t seed = 1;
};

struct SimStep {
  double t = 0.0;
  State3 state;
  int decision = 0;  // ReplanDecision::Action
  std::size_t candidates = 0;
  Vec3 selected_wp;
  StageTimes times;
  double min_obstacle_dist = std::numeric_limits<double>::infinity();
};

struct SimLog {
  std::vector<SimStep> steps;
  bool goal_reached = false;
  bool collision = false;
  std::size_t replan_count = 0;
  double total_time = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  std::string termination;
};

/// Precomputed surface point sets for the scenario obstacles (deterministic
/// for a fixed seed).
struct World {
  explicit World(const Scenario& scn);

  const Scenario& scenario() const { return *scn_; }
  /// True Euclidean distance from p to the closest obstacle surface at time t.
  double surface_distance(const Vec3& p, double t) const;
  /// Simulated lidar scan from the MAV state at time t.
  PointCloud scan(const State3& mav, double t) const;

  struct BallPoints {
    std::vector<Vec3> local;  // sphere surface offsets
    std::size_t obstacle = 0;
  };

 private:
  const Scenario* scn_;
  std::vector<std::vector<Vec3>> box_points_;
  std::vector<BallPoints> ball_points_;
};

PointCloud synth_scan(const World& world, const State3& mav, double t);

SimLog run(const Scenario& scenario);

}  // namespace evade
