#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace evade {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3 operator-() const { return {-x, -y, -z}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? (*this) / n : Vec3{};
  }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Per-axis kinematic state (position, velocity, acceleration).
struct AxisState {
  double p = 0.0;
  double v = 0.0;
  double a = 0.0;

  bool finite() const {
    return std::isfinite(p) && std::isfinite(v) && std::isfinite(a);
  }
};

/// Full 3D state plus timestamp.
struct State3 {
  AxisState x, y, z;
  double timestamp = 0.0;

  AxisState& axis(std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  const AxisState& axis(std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 pos() const { return {x.p, y.p, z.p}; }
  Vec3 vel() const { return {x.v, y.v, z.v}; }
  Vec3 acc() const { return {x.a, y.a, z.a}; }

  static State3 at_rest(const Vec3& p, double stamp = 0.0) {
    State3 s;
    s.x.p = p.x;
    s.y.p = p.y;
    s.z.p = p.z;
    s.timestamp = stamp;
    return s;
  }
};

/// Asymmetric velocity/acceleration/jerk bounds for one axis.
struct AxisConstraints {
  double v_min = -1.0, v_max = 1.0;
  double a_min = -1.0, a_max = 1.0;
  double j_min = -1.0, j_max = 1.0;

  bool valid() const {
    return v_min < 0.0 && 0.0 < v_max && a_min < 0.0 && 0.0 < a_max &&
           j_min < 0.0 && 0.0 < j_max;
  }
};

using Constraints3 = std::array<AxisConstraints, 3>;

inline Constraints3 uniform_constraints(const AxisConstraints& c) {
  return {c, c, c};
}

class PlanError : public std::runtime_error {
 public:
  explicit PlanError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evade
