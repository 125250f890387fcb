#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "evade/collision.hpp"
#include "evade/trajectory.hpp"
#include "evade/types.hpp"

// Independent reference implementations used only by the tests. They trade
// speed for obviousness: dense time stepping and grid searches instead of
// closed forms.

namespace oracle {

using evade::AxisConstraints;
using evade::AxisProfile;
using evade::AxisState;
using evade::Trajectory;
using evade::Vec3;

inline double rand_in(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline AxisConstraints random_constraints(std::mt19937_64& rng) {
  AxisConstraints c;
  c.v_max = rand_in(rng, 0.5, 8.0);
  c.v_min = -rand_in(rng, 0.5, 8.0);
  c.a_max = rand_in(rng, 0.5, 8.0);
  c.a_min = -rand_in(rng, 0.5, 8.0);
  c.j_max = rand_in(rng, 1.0, 30.0);
  c.j_min = -rand_in(rng, 1.0, 30.0);
  return c;
}

// A boundary state that the planner can always connect from: bounded and
// holdable (the jerk needed to level off acceleration does not overshoot the
// velocity bounds).
inline AxisState random_boundary_state(std::mt19937_64& rng,
                                       const AxisConstraints& c, double p_range) {
  for (int tries = 0; tries < 1000; ++tries) {
    AxisState s;
    s.p = rand_in(rng, -p_range, p_range);
    s.v = rand_in(rng, 0.8 * c.v_min, 0.8 * c.v_max);
    s.a = rand_in(rng, 0.8 * c.a_min, 0.8 * c.a_max);
    const double up = s.v + s.a * s.a / (2.0 * -c.j_min);
    const double dn = s.v - s.a * s.a / (2.0 * c.j_max);
    // Usable as either endpoint: the a = 0 crossings on both sides of the
    // state stay inside the velocity bounds.
    if (up <= c.v_max && dn >= c.v_min) {
      return s;
    }
  }
  return {};
}

// Largest per-axis |v|, |a| and jerk violation of the profile on a dense grid.
inline double max_violation(const AxisProfile& prof, const AxisConstraints& c,
                            double dt = 1e-3) {
  double worst = 0.0;
  for (double t = 0.0; t <= prof.duration; t += dt) {
    const AxisState s = prof.state_at(t);
    worst = std::max({worst, s.v - c.v_max, c.v_min - s.v, s.a - c.a_max,
                      c.a_min - s.a});
  }
  for (const auto& seg : prof.segments) {
    worst = std::max({worst, seg.jerk - c.j_max, c.j_min - seg.jerk});
  }
  return worst;
}

// Brute-force minimum duration of a rest-to-rest problem: scan the cruise
// velocity, with acceleration ramps shaped triangular or saturated as needed,
// then refine the best cell by ternary search.
inline double brute_force_rest_to_rest(double distance, const AxisConstraints& c) {
  const double dir = distance >= 0.0 ? 1.0 : -1.0;
  const double D = std::abs(distance);
  if (D == 0.0) {
    return 0.0;
  }
  const double j_up = dir > 0.0 ? c.j_max : -c.j_min;
  const double j_dn = dir > 0.0 ? -c.j_min : c.j_max;
  const double a_acc = dir > 0.0 ? c.a_max : -c.a_min;
  const double a_dec = dir > 0.0 ? -c.a_min : c.a_max;
  const double v_cap = dir > 0.0 ? c.v_max : -c.v_min;
  const double k = 0.5 * (1.0 / j_up + 1.0 / j_dn);

  // Duration and distance of a 0 -> v -> 0 velocity bump capped at a_cap.
  auto ramp = [&](double v, double a_cap, double& dist) {
    const double a_need = std::sqrt(v / k);
    const double a = std::min(a_need, a_cap);
    const double t_hold = (v - k * a * a) / a;
    AxisState s{};
    s = evade::advance(s, j_up, a / j_up);
    s = evade::advance(s, 0.0, std::max(t_hold, 0.0));
    s = evade::advance(s, -j_dn, a / j_dn);
    dist = s.p;
    return a / j_up + std::max(t_hold, 0.0) + a / j_dn;
  };

  auto duration_at = [&](double v) {
    double d1 = 0.0, d2 = 0.0;
    const double t1 = ramp(v, a_acc, d1);
    const double t2 = ramp(v, a_dec, d2);
    if (d1 + d2 > D) {
      return std::numeric_limits<double>::infinity();
    }
    return t1 + t2 + (D - d1 - d2) / v;
  };

  const int n = 4000;
  double best = std::numeric_limits<double>::infinity();
  double best_v = v_cap;
  for (int i = 1; i <= n; ++i) {
    const double v = v_cap * i / n;
    const double T = duration_at(v);
    if (T < best) {
      best = T;
      best_v = v;
    }
  }
  double lo = std::max(best_v - v_cap / n, v_cap / (4.0 * n));
  double hi = std::min(best_v + v_cap / n, v_cap);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (duration_at(m1) <= duration_at(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min(best, duration_at(0.5 * (lo + hi)));
}

// Time-stepping replacement for the slab test: walk the window and report
// whether the moving point is ever strictly inside the open box.
inline bool stepped_slab_hit(const Vec3& p, const Vec3& v, const Vec3& center,
                             const Vec3& l, double t0, double t1,
                             double dt = 1e-3) {
  for (double t = t0; t <= t1; t += dt) {
    const Vec3 q = p + v * t;
    bool inside = true;
    for (std::size_t i = 0; i < 3; ++i) {
      inside = inside && std::abs(q[i] - center[i]) < l[i];
    }
    if (inside) {
      return true;
    }
  }
  return false;
}

// Elevation-angle restatement of the coverage model: blind above/below
// theta/2 from horizontal, range tested on the full radial distance.
inline evade::CoverageClass elevation_coverage(const Vec3& p_test,
                                               const evade::SensorModel& sensor,
                                               const Vec3& origin) {
  const Vec3 q = p_test - origin;
  const double r = q.norm();
  if (r <= sensor.mav_body_radius) {
    return evade::CoverageClass::kInsideBody;
  }
  if (r > sensor.l_lidar) {
    return evade::CoverageClass::kOutOfRange;
  }
  const double along = q.dot(sensor.p_norm);
  const double perp = (q - sensor.p_norm * along).norm();
  const double elevation = std::atan2(std::abs(along), perp);
  if (elevation > 0.5 * sensor.theta_lidar) {
    return along > 0.0 ? evade::CoverageClass::kUpperCone
                       : evade::CoverageClass::kLowerCone;
  }
  return evade::CoverageClass::kObservable;
}

// Angular distance of a point from the cone boundary, for excluding
// borderline instances from exact-match checks.
inline double boundary_margin(const Vec3& p_test, const evade::SensorModel& sensor,
                              const Vec3& origin) {
  const Vec3 q = p_test - origin;
  const double r = q.norm();
  const double along = q.dot(sensor.p_norm);
  const double perp = (q - sensor.p_norm * along).norm();
  const double elevation = std::atan2(std::abs(along), perp);
  double m = std::abs(elevation - 0.5 * sensor.theta_lidar);
  m = std::min(m, std::abs(r - sensor.l_lidar));
  m = std::min(m, std::abs(r - sensor.mav_body_radius));
  return m;
}

inline Trajectory random_trajectory(std::mt19937_64& rng, double p_range = 10.0);

}  // namespace oracle

#include "evade/planner.hpp"

namespace oracle {

inline Trajectory random_trajectory(std::mt19937_64& rng, double p_range) {
  for (int tries = 0; tries < 100; ++tries) {
    evade::Constraints3 c3;
    evade::State3 a, b;
    for (std::size_t i = 0; i < 3; ++i) {
      c3[i] = random_constraints(rng);
      a.axis(i) = random_boundary_state(rng, c3[i], p_range);
      b.axis(i) = random_boundary_state(rng, c3[i], p_range);
    }
    try {
      return evade::plan_3d(a, b, c3);
    } catch (const evade::PlanError&) {
    }
  }
  throw std::runtime_error("random_trajectory: no feasible instance");
}

}  // namespace oracle
