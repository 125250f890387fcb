#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "evade/avoidance.hpp"
#include "oracles.hpp"

using namespace evade;

namespace {

const Constraints3 kLimits = uniform_constraints({-5, 5, -5, 5, -20, 20});

PointCloud dense_grid_cloud(double extent, double spacing) {
  PointCloud cloud;
  for (double x = -extent; x <= extent; x += spacing) {
    for (double y = -extent; y <= extent; y += spacing) {
      for (double z = -extent; z <= extent; z += spacing) {
        cloud.add({{x, y, z}, {}});
      }
    }
  }
  return cloud;
}

}  // namespace

TEST_CASE("spheroid waypoints sit on the flattened shell") {
  SpheroidParams params;
  params.radii = {2.0};
  params.points_per_shell = 4;
  params.flattening = 1.0;
  const auto wps = spheroid_waypoints(State3::at_rest({1, 2, 3}), params);
  REQUIRE(wps.size() == 4);
  for (const auto& wp : wps) {
    CHECK((wp.position - Vec3{1, 2, 3}).norm() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(wp.source == WaypointCandidate::Source::kSpheroid);
  }

  params.flattening = 0.25;
  params.points_per_shell = 40;
  const auto flat = spheroid_waypoints(State3::at_rest({0, 0, 0}), params);
  for (const auto& wp : flat) {
    const Vec3& p = wp.position;
    const double r = 2.0;
    const double lhs = (p.x * p.x + p.y * p.y) / (r * r) +
                       p.z * p.z / (0.25 * r * 0.25 * r);
    CHECK(lhs == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("spheroid and tube counts scale with their parameters") {
  SpheroidParams sp;
  sp.radii = {2.0};
  sp.points_per_shell = 67;
  CHECK(spheroid_waypoints(State3::at_rest({0, 0, 0}), sp).size() == 67);

  const Trajectory traj =
      plan_3d(State3::at_rest({0, 0, 0}), State3::at_rest({6, 0, 0}), kLimits);
  TubeParams tp;
  tp.radii = {1.5, 3.0};
  tp.rings = 6;
  tp.points_per_ring = 17;
  CHECK(tube_waypoints(traj, tp).size() == 204);
}

TEST_CASE("tube rings are orthogonal to the local velocity") {
  const Trajectory traj =
      plan_3d(State3::at_rest({0, 0, 0}), State3::at_rest({6, 0, 0}), kLimits);
  TubeParams params;
  params.radii = {1.0};
  params.rings = 1;
  params.points_per_ring = 4;
  const auto wps = tube_waypoints(traj, params);
  REQUIRE(wps.size() == 4);
  const State3 mid = traj.eval(traj.duration / 2.0);
  int off_y = 0, off_z = 0;
  for (const auto& wp : wps) {
    const Vec3 d = wp.position - mid.pos();
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(d.dot(mid.vel().normalized())) < 1e-9);
    off_y += std::abs(d.y) > 0.99 ? 1 : 0;
    off_z += std::abs(d.z) > 0.99 ? 1 : 0;
  }
  CHECK(off_y == 2);
  CHECK(off_z == 2);
}

TEST_CASE("tube waypoints on a hover trajectory use horizontal rings") {
  // Dwell-like trajectory: nearly zero velocity everywhere.
  const Trajectory traj = plan_3d(State3::at_rest({0, 0, 0}),
                                  State3::at_rest({0, 0, 1e-7}), kLimits);
  TubeParams params;
  params.radii = {1.0};
  params.rings = 2;
  params.points_per_ring = 8;
  const auto wps = tube_waypoints(traj, params);
  for (const auto& wp : wps) {
    CHECK(std::abs(wp.position.z) < 1e-6);
  }
}

TEST_CASE("validate_candidate on an empty world is safe") {
  ReplanConfig cfg;
  const PointCloud empty;
  WaypointCandidate wp;
  wp.position = {3, 1, 0};
  const auto res =
      validate_candidate(State3::at_rest({0, 0, 0}), wp, empty, kLimits, cfg);
  CHECK(res.planned);
  CHECK(res.report.safe);
  CHECK(res.trajectory.target.pos().x == doctest::Approx(3.0));
  CHECK(res.trajectory.target.vel().norm() == doctest::Approx(0.0));
}

TEST_CASE("validate_candidate sees a wall between start and waypoint") {
  ReplanConfig cfg;
  PointCloud wall;
  for (double y = -4; y <= 4; y += 0.3) {
    for (double z = -4; z <= 4; z += 0.3) {
      wall.add({{2.0, y, z}, {}});
    }
  }
  WaypointCandidate wp;
  wp.position = {4, 0, 0};
  const auto res =
      validate_candidate(State3::at_rest({0, 0, 0}), wp, wall, kLimits, cfg);
  CHECK(res.planned);
  CHECK_FALSE(res.report.safe);
  CHECK(res.report.count(SampleClass::kCollide) > 0);
}

TEST_CASE("a candidate that exits an initial warning zone is safe") {
  ReplanConfig cfg;
  PointCloud cloud;
  cloud.add({{0.0, 1.0, 0.0}, {}});  // inside l_warn of the start, not l_coll
  WaypointCandidate wp;
  wp.position = {5, 0, 0};
  const auto res =
      validate_candidate(State3::at_rest({0, 0, 0}), wp, cloud, kLimits, cfg);
  CHECK(res.planned);
  CHECK(res.report.safe);
  CHECK(res.report.count(SampleClass::kWarn) > 0);
  CHECK(res.report.reason == "recovers from warning zone");
}

TEST_CASE("select_best implements the blended waypoint cost") {
  auto mk = [](const Vec3& p) {
    CandidateResult r;
    r.waypoint.position = p;
    r.planned = true;
    r.report.safe = true;
    return r;
  };
  const Vec3 goal{0, 0, 0};

  SUBCASE("worked example: costs (2.0, 1.0) select the second candidate") {
    // |AC| = (1, 2), |AB| = (3, 0), alpha = 0.5 -> costs (2.0, 1.0).
    std::vector<CandidateResult> safe{mk({1, 0, 0}), mk({-2, 0, 0})};
    SelectionState sel;
    sel.alpha = 0.5;
    sel.previous_waypoint = Vec3{-2, 0, 0};
    CHECK(select_best(safe, goal, sel) == 1);
  }

  SUBCASE("alpha=1 is nearest-to-goal") {
    std::vector<CandidateResult> safe{mk({5, 0, 0}), mk({1, 1, 0}), mk({0, 3, 0})};
    SelectionState sel;
    sel.alpha = 1.0;
    sel.previous_waypoint = Vec3{5, 0, 0};
    CHECK(select_best(safe, goal, sel) == 1);
  }

  SUBCASE("alpha=0 re-selects the previous waypoint") {
    std::vector<CandidateResult> safe{mk({5, 0, 0}), mk({1, 1, 0}), mk({0, 3, 0})};
    SelectionState sel;
    sel.alpha = 0.0;
    sel.previous_waypoint = Vec3{0, 3, 0};
    CHECK(select_best(safe, goal, sel) == 2);
  }

  SUBCASE("no previous waypoint reduces to goal distance") {
    std::vector<CandidateResult> safe{mk({5, 0, 0}), mk({1, 1, 0})};
    SelectionState sel;
    sel.alpha = 0.2;
    CHECK(select_best(safe, goal, sel) == 1);
  }

  SUBCASE("argmin invariant under uniform scaling") {
    std::mt19937_64 rng(73);
    for (int i = 0; i < 50; ++i) {
      std::vector<CandidateResult> safe;
      for (int k = 0; k < 6; ++k) {
        safe.push_back(mk({oracle::rand_in(rng, -4, 4), oracle::rand_in(rng, -4, 4),
                           oracle::rand_in(rng, -4, 4)}));
      }
      SelectionState sel;
      sel.alpha = oracle::rand_in(rng, 0.0, 1.0);
      sel.previous_waypoint =
          Vec3{oracle::rand_in(rng, -4, 4), oracle::rand_in(rng, -4, 4), 0.0};
      const std::size_t a = select_best(safe, goal, sel);
      const double s = 7.3;
      std::vector<CandidateResult> scaled;
      for (const auto& r : safe) {
        scaled.push_back(mk(r.waypoint.position * s));
      }
      SelectionState sel2 = sel;
      sel2.previous_waypoint = *sel.previous_waypoint * s;
      CHECK(select_best(scaled, goal * s, sel2) == a);
    }
  }
}

TEST_CASE("replan_step keeps a safe nominal trajectory") {
  ReplanConfig cfg;
  SelectionState sel;
  const PointCloud empty;
  const Vec3 goal{5, 0, 0};
  const Trajectory nominal =
      plan_3d(State3::at_rest({0, 0, 0}), State3::at_rest(goal), kLimits);
  auto dec = replan_step(empty, nominal, goal, State3::at_rest({0, 0, 0}),
                         kLimits, sel, cfg);
  CHECK(dec.action == ReplanDecision::Action::kKeepCurrent);
  CHECK_FALSE(dec.replanned);
  CHECK(dec.candidates_considered == 0);
}

TEST_CASE("replan_step switches to an alternative around an obstacle") {
  ReplanConfig cfg;
  SelectionState sel;
  PointCloud wall;
  for (double y = -1.5; y <= 1.5; y += 0.25) {
    for (double z = -1.5; z <= 1.5; z += 0.25) {
      wall.add({{3.0, y, z}, {}});
    }
  }
  const Vec3 goal{6, 0, 0};
  const State3 state = State3::at_rest({0, 0, 0});
  auto dec = replan_step(wall, std::nullopt, goal, state, kLimits, sel, cfg);
  CHECK(dec.action == ReplanDecision::Action::kSwitchAlternative);
  CHECK(dec.replanned);
  CHECK(dec.candidates_safe > 0);
  CHECK(dec.waypoint.has_value());
  CHECK(sel.previous_waypoint.has_value());
  // Continuity: the executed trajectory starts at the current state.
  const State3 s0 = dec.trajectory.eval(0.0);
  CHECK((s0.pos() - state.pos()).norm() < 1e-6);
  CHECK((s0.vel() - state.vel()).norm() < 1e-6);

  // Identical snapshot and fresh selection state reproduce the decision.
  SelectionState sel2;
  auto dec2 = replan_step(wall, std::nullopt, goal, state, kLimits, sel2, cfg);
  CHECK(dec2.waypoint->position.x == dec.waypoint->position.x);
  CHECK(dec2.waypoint->position.y == dec.waypoint->position.y);
  CHECK(dec2.candidates_considered == dec.candidates_considered);
}

TEST_CASE("replan_step flags an emergency when nothing is safe") {
  ReplanConfig cfg;
  cfg.max_candidates = 24;
  SelectionState sel;
  const PointCloud everywhere = dense_grid_cloud(6.0, 1.0);
  const Vec3 goal{5, 0, 0};
  auto dec = replan_step(everywhere, std::nullopt, goal,
                         State3::at_rest({0, 0, 0}), kLimits, sel, cfg);
  CHECK(dec.action == ReplanDecision::Action::kEmergency);
  CHECK(dec.candidates_safe == 0);
  CHECK(dec.candidates_considered > 0);
}

TEST_CASE("adaptive mode respects the wall-clock budget") {
  ReplanConfig cfg;
  cfg.adaptive = true;
  cfg.budget_s = 1e-6;  // already expired after the first block
  SelectionState sel;
  PointCloud wall;
  for (double y = -1.5; y <= 1.5; y += 0.25) {
    for (double z = -1.5; z <= 1.5; z += 0.25) {
      wall.add({{3.0, y, z}, {}});
    }
  }
  auto dec = replan_step(wall, std::nullopt, {6, 0, 0}, State3::at_rest({0, 0, 0}),
                         kLimits, sel, cfg);
  CHECK(dec.candidates_considered >= 1);
  const std::size_t total = tube_waypoints(plan_3d(State3::at_rest({0, 0, 0}),
                                                   State3::at_rest({6, 0, 0}),
                                                   kLimits),
                                           cfg.tube)
                                .size() +
                            spheroid_waypoints(State3::at_rest({0, 0, 0}),
                                               cfg.spheroid)
                                .size();
  CHECK(dec.candidates_considered < total);
}
