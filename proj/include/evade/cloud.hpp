#pragma once

#include <cstdint>
#include <vector>

#include "evade/types.hpp"

namespace evade {

struct CloudPoint {
  Vec3 p;
  Vec3 v;  // zero for static returns

  bool finite() const { return p.finite() && v.finite(); }
};

/// Point cloud in structure-of-arrays layout for the batch kernels.
struct PointCloud {
  std::vector<double> px, py, pz;
  std::vector<double> vx, vy, vz;
  Vec3 sensor_origin;
  double stamp = 0.0;

  std::size_t size() const { return px.size(); }
  bool empty() const { return px.empty(); }

  void add(const CloudPoint& pt) {
    px.push_back(pt.p.x);
    py.push_back(pt.p.y);
    pz.push_back(pt.p.z);
    vx.push_back(pt.v.x);
    vy.push_back(pt.v.y);
    vz.push_back(pt.v.z);
  }

  CloudPoint point(std::size_t i) const {
    return {{px[i], py[i], pz[i]}, {vx[i], vy[i], vz[i]}};
  }

  void reserve(std::size_t n) {
    px.reserve(n);
    py.reserve(n);
    pz.reserve(n);
    vx.reserve(n);
    vy.reserve(n);
    vz.reserve(n);
  }
};

/// Nested per-axis clearance half-extents (collision strictly inside warning).
struct ClearanceSpec {
  Vec3 l_coll{0.8, 0.8, 0.8};
  Vec3 l_warn{1.3, 1.3, 1.3};

  bool valid() const {
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(0.0 < l_coll[i] && l_coll[i] < l_warn[i])) {
        return false;
      }
    }
    return true;
  }
};

/// Spinning-lidar coverage model: omnidirectional with two blind cones along
/// p_norm plus a maximum range.
struct SensorModel {
  double theta_lidar = 33.2 * 3.14159265358979323846 / 180.0;
  double l_lidar = 120.0;
  Vec3 p_norm{0.0, 0.0, 1.0};
  double mav_body_radius = 0.5;
};

}  // namespace evade
