#pragma once

#include <string>
#include <vector>

#include "evade/aabb.hpp"
#include "evade/cloud.hpp"
#include "evade/sampling.hpp"

namespace evade {

enum class SampleClass { kSafe, kWarn, kCollide, kUnobserved };
enum class CoverageClass {
  kObservable,
  kUpperCone,
  kLowerCone,
  kOutOfRange,
  kInsideBody
};

struct SampleVerdict {
  std::size_t sample_index = 0;
  SampleClass cls = SampleClass::kSafe;
  std::vector<std::uint32_t> offending_points;  // cloud indices
};

struct SafetyReport {
  std::vector<SampleVerdict> verdicts;
  bool safe = true;
  std::string reason;

  std::size_t count(SampleClass c) const {
    std::size_t n = 0;
    for (const auto& v : verdicts) {
      n += (v.cls == c) ? 1 : 0;
    }
    return n;
  }
};

enum class CheckContext { kExecuting, kCandidate };

/// Point strictly inside the open box p_test +- l in all three axes.
bool check_static(const Vec3& p_test, const CloudPoint& point, const Vec3& l);

/// Moving point crossing the open box during [t_lo, t_hi] (slab test).
bool check_moving(const Vec3& p_test, const CloudPoint& point, const Vec3& l,
                  double t_lo, double t_hi);

/// Lidar coverage class of a world point relative to the sensor origin.
CoverageClass coverage_class(const Vec3& p_test, const SensorModel& sensor,
                             const Vec3& sensor_origin);

/// Cloud indices that can interact with the box over [0, horizon].
/// Purely a performance filter; classification is unchanged by it.
std::vector<std::uint32_t> crop_cloud(const PointCloud& cloud, const Aabb& box,
                                      double horizon);

/// Compact static/moving split of a cropped cloud, ready for the batch
/// kernels.
struct CroppedCloud {
  PointCloud static_pts;   // velocities all zero
  PointCloud moving_pts;
  std::vector<std::uint32_t> static_orig;  // indices into the source cloud
  std::vector<std::uint32_t> moving_orig;

  std::size_t size() const { return static_pts.size() + moving_pts.size(); }
};

CroppedCloud split_cropped(const PointCloud& cloud,
                           const std::vector<std::uint32_t>& indices);

/// Crop box for a trajectory: its AABB inflated so that no point within
/// warning distance of any on-trajectory sample can be discarded.
Aabb crop_box(const Trajectory& traj, const ClearanceSpec& spec);

std::vector<SampleVerdict> classify_samples(
    const std::vector<TrajectorySample>& samples, const CroppedCloud& cloud,
    const ClearanceSpec& spec, const SensorModel& sensor,
    const Vec3& sensor_origin, double horizon);

SafetyReport classify_trajectory(std::vector<SampleVerdict> verdicts,
                                 CheckContext context);

/// Full pipeline for one trajectory against one cloud snapshot.
SafetyReport check_trajectory(const Trajectory& traj, const PointCloud& cloud,
                              const ClearanceSpec& spec,
                              const SensorModel& sensor, const Vec3& dp,
                              CheckContext context, bool use_crop = true);

}  // namespace evade
