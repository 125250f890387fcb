#include "evade/collision.hpp"

#include <algorithm>
#include <cmath>

#include "evade/kernels.hpp"

namespace evade {

bool check_static(const Vec3& p_test, const CloudPoint& point, const Vec3& l) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(point.p[i] > p_test[i] - l[i] && point.p[i] < p_test[i] + l[i])) {
      return false;
    }
  }
  return true;
}

bool check_moving(const Vec3& p_test, const CloudPoint& point, const Vec3& l,
                  double t_lo, double t_hi) {
  const double center[3] = {p_test.x, p_test.y, p_test.z};
  const double half[3] = {l.x, l.y, l.z};
  std::vector<std::uint32_t> hits;
  kernels::scalar_ops().slab_hits(&point.p.x, &point.p.y, &point.p.z,
                                  &point.v.x, &point.v.y, &point.v.z, 1, center,
                                  half, t_lo, t_hi, hits);
  return !hits.empty();
}

CoverageClass coverage_class(const Vec3& p_test, const SensorModel& sensor,
                             const Vec3& sensor_origin) {
  const Vec3 q = p_test - sensor_origin;
  const double dist = q.norm();
  if (dist <= sensor.mav_body_radius) {
    return CoverageClass::kInsideBody;
  }
  if (dist > sensor.l_lidar) {
    return CoverageClass::kOutOfRange;
  }
  const double along = sensor.p_norm.dot(q);
  const Vec3 p_is = along * sensor.p_norm;
  const double l_cone =
      std::abs(along) * std::tan(M_PI / 2.0 - sensor.theta_lidar / 2.0);
  const double l_test = (q - p_is).norm();
  if (l_test < l_cone) {
    return along > 0.0 ? CoverageClass::kUpperCone : CoverageClass::kLowerCone;
  }
  return CoverageClass::kObservable;
}

std::vector<std::uint32_t> crop_cloud(const PointCloud& cloud, const Aabb& box,
                                      double horizon) {
  std::vector<std::uint32_t> out;
  if (cloud.empty()) {
    return out;
  }
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};
  kernels::ops().crop(cloud.px.data(), cloud.py.data(), cloud.pz.data(),
                      cloud.vx.data(), cloud.vy.data(), cloud.vz.data(),
                      cloud.size(), lo, hi, horizon, out);
  return out;
}

CroppedCloud split_cropped(const PointCloud& cloud,
                           const std::vector<std::uint32_t>& indices) {
  CroppedCloud out;
  for (std::uint32_t i : indices) {
    const bool moving =
        cloud.vx[i] != 0.0 || cloud.vy[i] != 0.0 || cloud.vz[i] != 0.0;
    if (moving) {
      out.moving_pts.add(cloud.point(i));
      out.moving_orig.push_back(i);
    } else {
      out.static_pts.add(cloud.point(i));
      out.static_orig.push_back(i);
    }
  }
  out.static_pts.sensor_origin = cloud.sensor_origin;
  out.moving_pts.sensor_origin = cloud.sensor_origin;
  return out;
}

Aabb crop_box(const Trajectory& traj, const ClearanceSpec& spec) {
  // Uninflated trajectory box, grown by the warning extent plus a margin so
  // the strict per-sample tests can never reach a discarded point.
  const Aabb base = compute_aabb(traj, Vec3{});
  return base.inflated(spec.l_warn + Vec3{1e-6, 1e-6, 1e-6});
}

namespace {

void gather_hits(const PointCloud& pts, const Vec3& center, const Vec3& l,
                 double horizon, bool moving, std::vector<std::uint32_t>& out) {
  if (pts.empty()) {
    return;
  }
  const double c[3] = {center.x, center.y, center.z};
  const double half[3] = {l.x, l.y, l.z};
  if (moving) {
    kernels::ops().slab_hits(pts.px.data(), pts.py.data(), pts.pz.data(),
                             pts.vx.data(), pts.vy.data(), pts.vz.data(),
                             pts.size(), c, half, 0.0, horizon, out);
  } else {
    kernels::ops().box_hits(pts.px.data(), pts.py.data(), pts.pz.data(),
                            pts.size(), c, half, out);
  }
}

}  // namespace

std::vector<SampleVerdict> classify_samples(
    const std::vector<TrajectorySample>& samples, const CroppedCloud& cloud,
    const ClearanceSpec& spec, const SensorModel& sensor,
    const Vec3& sensor_origin, double horizon) {
  std::vector<SampleVerdict> out;
  out.reserve(samples.size());
  std::vector<std::uint32_t> warn_static, warn_moving, coll;
  for (std::size_t si = 0; si < samples.size(); ++si) {
    const Vec3 pos = samples[si].state.pos();
    SampleVerdict v;
    v.sample_index = si;

    warn_static.clear();
    warn_moving.clear();
    gather_hits(cloud.static_pts, pos, spec.l_warn, horizon, false, warn_static);
    gather_hits(cloud.moving_pts, pos, spec.l_warn, horizon, true, warn_moving);

    if (!warn_static.empty() || !warn_moving.empty()) {
      coll.clear();
      gather_hits(cloud.static_pts, pos, spec.l_coll, horizon, false, coll);
      bool collide = !coll.empty();
      for (std::uint32_t i : coll) {
        v.offending_points.push_back(cloud.static_orig[i]);
      }
      coll.clear();
      gather_hits(cloud.moving_pts, pos, spec.l_coll, horizon, true, coll);
      collide = collide || !coll.empty();
      for (std::uint32_t i : coll) {
        v.offending_points.push_back(cloud.moving_orig[i]);
      }
      if (collide) {
        v.cls = SampleClass::kCollide;
      } else {
        v.cls = SampleClass::kWarn;
        for (std::uint32_t i : warn_static) {
          v.offending_points.push_back(cloud.static_orig[i]);
        }
        for (std::uint32_t i : warn_moving) {
          v.offending_points.push_back(cloud.moving_orig[i]);
        }
      }
    } else {
      const CoverageClass cov = coverage_class(pos, sensor, sensor_origin);
      if (cov != CoverageClass::kObservable &&
          cov != CoverageClass::kInsideBody) {
        v.cls = SampleClass::kUnobserved;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

SafetyReport classify_trajectory(std::vector<SampleVerdict> verdicts,
                                 CheckContext context) {
  SafetyReport report;
  report.verdicts = std::move(verdicts);
  if (report.verdicts.empty()) {
    report.safe = false;
    report.reason = "no samples";
    return report;
  }

  std::size_t warn_prefix = 0;
  while (warn_prefix < report.verdicts.size() &&
         report.verdicts[warn_prefix].cls == SampleClass::kWarn) {
    ++warn_prefix;
  }
  for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
    const SampleClass c = report.verdicts[i].cls;
    if (c == SampleClass::kCollide) {
      report.safe = false;
      report.reason = "collision at sample " + std::to_string(i);
      return report;
    }
    if (c == SampleClass::kUnobserved) {
      report.safe = false;
      report.reason = "unobserved space at sample " + std::to_string(i);
      return report;
    }
    if (c == SampleClass::kWarn && i >= warn_prefix) {
      report.safe = false;
      report.reason = (context == CheckContext::kCandidate)
                          ? "enters warning zone at sample " + std::to_string(i)
                          : "re-enters warning zone at sample " + std::to_string(i);
      return report;
    }
  }
  // A warning state is acceptable only when the trajectory leaves it.
  if (warn_prefix == report.verdicts.size()) {
    report.safe = false;
    report.reason = "warning zone does not clear";
    return report;
  }
  report.safe = true;
  report.reason = warn_prefix > 0 ? "recovers from warning zone" : "clear";
  return report;
}

SafetyReport check_trajectory(const Trajectory& traj, const PointCloud& cloud,
                              const ClearanceSpec& spec,
                              const SensorModel& sensor, const Vec3& dp,
                              CheckContext context, bool use_crop) {
  const double horizon = traj.duration;
  CroppedCloud cropped;
  if (use_crop) {
    const Aabb box = crop_box(traj, spec);
    cropped = split_cropped(cloud, crop_cloud(cloud, box, horizon));
  } else {
    std::vector<std::uint32_t> all(cloud.size());
    for (std::uint32_t i = 0; i < cloud.size(); ++i) {
      all[i] = i;
    }
    cropped = split_cropped(cloud, all);
  }
  auto samples = sample_constant_distance(traj, dp);
  auto verdicts = classify_samples(samples, cropped, spec, sensor,
                                   cloud.sensor_origin, horizon);
  return classify_trajectory(std::move(verdicts), context);
}

}  // namespace evade
