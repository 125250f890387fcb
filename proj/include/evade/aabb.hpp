#pragma once

#include "evade/trajectory.hpp"

namespace evade {

struct Aabb {
  Vec3 min, max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
  Aabb inflated(const Vec3& by) const { return {min - by, max + by}; }
};

/// Exact bounding box of the trajectory from the per-segment polynomial
/// extrema, inflated by the vehicle half extent.
Aabb compute_aabb(const Trajectory& traj, const Vec3& mav_half_extent);

}  // namespace evade
