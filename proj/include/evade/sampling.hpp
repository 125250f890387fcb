#pragma once

#include <vector>

#include "evade/trajectory.hpp"

namespace evade {

struct TrajectorySample {
  double t = 0.0;
  State3 state;
};

/// Smallest positive t with v*t + a/2*t^2 + j/6*t^3 = dp, or +inf when the
/// displacement is never reached.
double first_displacement_time(double v, double a, double j, double dp);

/// Samples such that consecutive per-axis displacements stay within dp per
/// axis. Segment borders of all axes and t = 0, T are always included.
std::vector<TrajectorySample> sample_constant_distance(const Trajectory& traj,
                                                       const Vec3& dp);

/// Fixed time-step sampling (dt > 0); always includes t = 0 and t = T.
std::vector<TrajectorySample> sample_constant_time(const Trajectory& traj,
                                                   double dt);

}  // namespace evade
