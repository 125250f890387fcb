#include <algorithm>
#include <limits>

#include "evade/kernels.hpp"

namespace evade::kernels {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Entry/exit interval of one axis of the slab test. A zero-velocity axis
// contributes (-inf, inf) when inside and an empty interval when outside.
inline void axis_interval(double p, double v, double lo, double hi,
                          bool strict, double& t_in, double& t_out) {
  if (v == 0.0) {
    const bool inside = strict ? (p > lo && p < hi) : (p >= lo && p <= hi);
    t_in = inside ? -kInf : kInf;
    t_out = inside ? kInf : -kInf;
    return;
  }
  const double ta = (lo - p) / v;
  const double tb = (hi - p) / v;
  t_in = std::min(ta, tb);
  t_out = std::max(ta, tb);
}

void crop_scalar(const double* px, const double* py, const double* pz,
                 const double* vx, const double* vy, const double* vz,
                 std::size_t n, const double lo[3], const double hi[3],
                 double horizon, std::vector<std::uint32_t>& out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double p[3] = {px[i], py[i], pz[i]};
    const double v[3] = {vx[i], vy[i], vz[i]};
    if (v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0) {
      if (p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1] &&
          p[2] >= lo[2] && p[2] <= hi[2]) {
        out.push_back(static_cast<std::uint32_t>(i));
      }
      continue;
    }
    double t_in = 0.0, t_out = horizon;
    for (int a = 0; a < 3 && t_in <= t_out; ++a) {
      double ti, to;
      axis_interval(p[a], v[a], lo[a], hi[a], false, ti, to);
      t_in = std::max(t_in, ti);
      t_out = std::min(t_out, to);
    }
    if (t_in <= t_out) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
}

void box_hits_scalar(const double* px, const double* py, const double* pz,
                     std::size_t n, const double center[3], const double l[3],
                     std::vector<std::uint32_t>& out) {
  const double lo[3] = {center[0] - l[0], center[1] - l[1], center[2] - l[2]};
  const double hi[3] = {center[0] + l[0], center[1] + l[1], center[2] + l[2]};
  for (std::size_t i = 0; i < n; ++i) {
    if (px[i] > lo[0] && px[i] < hi[0] && py[i] > lo[1] && py[i] < hi[1] &&
        pz[i] > lo[2] && pz[i] < hi[2]) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
}

void slab_hits_scalar(const double* px, const double* py, const double* pz,
                      const double* vx, const double* vy, const double* vz,
                      std::size_t n, const double center[3], const double l[3],
                      double t0, double t1, std::vector<std::uint32_t>& out) {
  const double lo[3] = {center[0] - l[0], center[1] - l[1], center[2] - l[2]};
  const double hi[3] = {center[0] + l[0], center[1] + l[1], center[2] + l[2]};
  for (std::size_t i = 0; i < n; ++i) {
    const double p[3] = {px[i], py[i], pz[i]};
    const double v[3] = {vx[i], vy[i], vz[i]};
    double t_in = -kInf, t_out = kInf;
    for (int a = 0; a < 3; ++a) {
      double ti, to;
      axis_interval(p[a], v[a], lo[a], hi[a], true, ti, to);
      t_in = std::max(t_in, ti);
      t_out = std::min(t_out, to);
    }
    // Strict overlap (face contact is no hit), intersected with the window.
    if (t_in < t_out && t_in < t1 && t_out > t0) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{crop_scalar, box_hits_scalar, slab_hits_scalar};
  return ops;
}

}  // namespace evade::kernels
