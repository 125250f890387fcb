#pragma once

#include <vector>

#include "evade/types.hpp"

namespace evade {

/// One constant-jerk piece. `start` is the axis state at the segment's
/// local t = 0.
struct Segment {
  double duration = 0.0;
  double jerk = 0.0;
  AxisState start;
};

inline AxisState advance(const AxisState& s, double jerk, double t) {
  AxisState out;
  out.p = s.p + s.v * t + 0.5 * s.a * t * t + jerk * t * t * t / 6.0;
  out.v = s.v + s.a * t + 0.5 * jerk * t * t;
  out.a = s.a + jerk * t;
  return out;
}

/// Ordered constant-jerk segments for one axis. Segment start states chain.
struct AxisProfile {
  std::vector<Segment> segments;
  double duration = 0.0;

  AxisState state_at(double t) const;
  AxisState end_state() const;
};

/// Piecewise constant-jerk 3D trajectory with a common duration.
struct Trajectory {
  std::array<AxisProfile, 3> axes;
  double duration = 0.0;
  State3 start;
  State3 target;

  State3 eval(double t) const;
  /// Remaining trajectory from time t0 (re-chained segments, duration T - t0).
  Trajectory tail(double t0) const;
};

}  // namespace evade
