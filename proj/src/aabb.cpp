#include "evade/aabb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evade {

Aabb compute_aabb(const Trajectory& traj, const Vec3& mav_half_extent) {
  Aabb box;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto consider = [&](double p) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    };
    const AxisProfile& prof = traj.axes[axis];
    if (prof.segments.empty()) {
      consider(traj.start.axis(axis).p);
    }
    for (const Segment& seg : prof.segments) {
      const AxisState& s = seg.start;
      consider(s.p);
      consider(advance(s, seg.jerk, seg.duration).p);
      auto consider_time = [&](double t) {
        if (t > 0.0 && t < seg.duration) {
          consider(advance(s, seg.jerk, t).p);
        }
      };
      if (seg.jerk != 0.0) {
        const double disc = s.a * s.a - 2.0 * seg.jerk * s.v;
        if (disc >= 0.0) {
          const double r = std::sqrt(disc);
          consider_time((-s.a + r) / seg.jerk);
          consider_time((-s.a - r) / seg.jerk);
        }
      } else if (s.a != 0.0) {
        consider_time(-s.v / s.a);
      }
      // jerk == 0 and a == 0: position is linear, endpoints suffice.
    }
    box.min[axis] = lo - mav_half_extent[axis];
    box.max[axis] = hi + mav_half_extent[axis];
  }
  return box;
}

}  // namespace evade
