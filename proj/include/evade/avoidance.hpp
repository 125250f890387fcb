#pragma once

#include <optional>

#include "evade/collision.hpp"
#include "evade/planner.hpp"

namespace evade {

struct WaypointCandidate {
  Vec3 position;
  enum class Source { kCommanded, kSpheroid, kTube } source = Source::kCommanded;
  int shell = 0;  // spheroid shell / tube ring
  int index = 0;  // point index on the shell or ring
};

struct SpheroidParams {
  std::vector<double> radii{2.0, 4.0};
  int points_per_shell = 32;
  double flattening = 0.5;  // vertical semi-axis = flattening * radius

  bool valid() const;
};

struct TubeParams {
  std::vector<double> radii{1.5, 3.0};
  int rings = 4;
  int points_per_ring = 8;

  bool valid() const;
};

struct SelectionState {
  std::optional<Vec3> previous_waypoint;
  double alpha = 0.5;
};

struct ReplanConfig {
  double budget_s = 0.05;
  bool adaptive = false;     // false: fixed candidate count
  int max_candidates = 128;  // fixed-count mode
  Vec3 dp{0.1, 0.1, 0.1};
  ClearanceSpec clearance;
  SensorModel sensor;
  SpheroidParams spheroid;
  TubeParams tube;
  int threads = 1;
};

/// Per-stage wall-clock times of one candidate validation, in seconds.
struct StageTimes {
  double generation = 0.0;
  double aabb = 0.0;
  double crop = 0.0;
  double rollout = 0.0;
  double check = 0.0;

  double total() const { return generation + aabb + crop + rollout + check; }
  StageTimes& operator+=(const StageTimes& o);
};

struct CandidateResult {
  WaypointCandidate waypoint;
  Trajectory trajectory;
  SafetyReport report;
  bool planned = false;  // false: planner rejected the boundary states
  std::string discard_reason;
  StageTimes times;
};

std::vector<WaypointCandidate> spheroid_waypoints(const State3& center,
                                                  const SpheroidParams& params);

std::vector<WaypointCandidate> tube_waypoints(const Trajectory& original,
                                              const TubeParams& params);

/// plan to rest at the waypoint, then run the full safety pipeline.
CandidateResult validate_candidate(const State3& start,
                                   const WaypointCandidate& wp,
                                   const PointCloud& cloud,
                                   const Constraints3& constraints,
                                   const ReplanConfig& cfg);

/// Argmin of alpha*|wp - commanded| + (1-alpha)*|wp - previous| over the safe
/// set; ties broken by generation order. Index into `safe`.
std::size_t select_best(const std::vector<CandidateResult>& safe,
                        const Vec3& commanded_wp, const SelectionState& sel);

struct ReplanDecision {
  enum class Action { kKeepCurrent, kSwitchNominal, kSwitchAlternative, kEmergency };
  Action action = Action::kKeepCurrent;
  Trajectory trajectory;  // the trajectory to execute
  std::optional<WaypointCandidate> waypoint;
  std::size_t candidates_considered = 0;
  std::size_t candidates_safe = 0;
  bool replanned = false;  // candidate generation ran
  StageTimes times;
};

/// One replanning cycle: keep the current trajectory when it is still safe
/// (preferring a safe nominal trajectory to the commanded waypoint),
/// otherwise search tube then spheroid candidates under the budget.
ReplanDecision replan_step(const PointCloud& cloud,
                           const std::optional<Trajectory>& current,
                           const Vec3& commanded_wp, const State3& state,
                           const Constraints3& constraints, SelectionState& sel,
                           const ReplanConfig& cfg);

}  // namespace evade
