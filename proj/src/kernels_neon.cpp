#if defined(__aarch64__)

#include <arm_neon.h>

#include <limits>

#include "evade/kernels.hpp"

namespace evade::kernels {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  float64x2_t t_in;
  float64x2_t t_out;
};

template <bool Strict>
inline Interval axis_interval2(float64x2_t p, float64x2_t v, float64x2_t lo,
                               float64x2_t hi) {
  const float64x2_t ta = vdivq_f64(vsubq_f64(lo, p), v);
  const float64x2_t tb = vdivq_f64(vsubq_f64(hi, p), v);
  float64x2_t ti = vminq_f64(ta, tb);
  float64x2_t to = vmaxq_f64(ta, tb);

  const uint64x2_t vzero = vceqzq_f64(v);
  uint64x2_t inside;
  if (Strict) {
    inside = vandq_u64(vcgtq_f64(p, lo), vcltq_f64(p, hi));
  } else {
    inside = vandq_u64(vcgeq_f64(p, lo), vcleq_f64(p, hi));
  }
  const float64x2_t pinf = vdupq_n_f64(kInf);
  const float64x2_t ninf = vdupq_n_f64(-kInf);
  const float64x2_t ti0 = vbslq_f64(inside, ninf, pinf);
  const float64x2_t to0 = vbslq_f64(inside, pinf, ninf);
  ti = vbslq_f64(vzero, ti0, ti);
  to = vbslq_f64(vzero, to0, to);
  return {ti, to};
}

inline void emit(uint64x2_t mask, std::size_t base,
                 std::vector<std::uint32_t>& out) {
  if (vgetq_lane_u64(mask, 0)) {
    out.push_back(static_cast<std::uint32_t>(base));
  }
  if (vgetq_lane_u64(mask, 1)) {
    out.push_back(static_cast<std::uint32_t>(base + 1));
  }
}

void crop_neon(const double* px, const double* py, const double* pz,
               const double* vx, const double* vy, const double* vz,
               std::size_t n, const double lo[3], const double hi[3],
               double horizon, std::vector<std::uint32_t>& out) {
  const float64x2_t lox = vdupq_n_f64(lo[0]), hix = vdupq_n_f64(hi[0]);
  const float64x2_t loy = vdupq_n_f64(lo[1]), hiy = vdupq_n_f64(hi[1]);
  const float64x2_t loz = vdupq_n_f64(lo[2]), hiz = vdupq_n_f64(hi[2]);
  const float64x2_t t0 = vdupq_n_f64(0.0);
  const float64x2_t t1 = vdupq_n_f64(horizon);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const Interval ix =
        axis_interval2<false>(vld1q_f64(px + i), vld1q_f64(vx + i), lox, hix);
    const Interval iy =
        axis_interval2<false>(vld1q_f64(py + i), vld1q_f64(vy + i), loy, hiy);
    const Interval iz =
        axis_interval2<false>(vld1q_f64(pz + i), vld1q_f64(vz + i), loz, hiz);
    const float64x2_t t_in =
        vmaxq_f64(t0, vmaxq_f64(ix.t_in, vmaxq_f64(iy.t_in, iz.t_in)));
    const float64x2_t t_out =
        vminq_f64(t1, vminq_f64(ix.t_out, vminq_f64(iy.t_out, iz.t_out)));
    emit(vcleq_f64(t_in, t_out), i, out);
  }
  if (i < n) {
    std::vector<std::uint32_t> tail;
    scalar_ops().crop(px + i, py + i, pz + i, vx + i, vy + i, vz + i, n - i,
                      lo, hi, horizon, tail);
    for (std::uint32_t t : tail) {
      out.push_back(static_cast<std::uint32_t>(i) + t);
    }
  }
}

void box_hits_neon(const double* px, const double* py, const double* pz,
                   std::size_t n, const double center[3], const double l[3],
                   std::vector<std::uint32_t>& out) {
  const float64x2_t lox = vdupq_n_f64(center[0] - l[0]);
  const float64x2_t hix = vdupq_n_f64(center[0] + l[0]);
  const float64x2_t loy = vdupq_n_f64(center[1] - l[1]);
  const float64x2_t hiy = vdupq_n_f64(center[1] + l[1]);
  const float64x2_t loz = vdupq_n_f64(center[2] - l[2]);
  const float64x2_t hiz = vdupq_n_f64(center[2] + l[2]);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(px + i);
    const float64x2_t y = vld1q_f64(py + i);
    const float64x2_t z = vld1q_f64(pz + i);
    uint64x2_t hit = vandq_u64(vcgtq_f64(x, lox), vcltq_f64(x, hix));
    hit = vandq_u64(hit, vcgtq_f64(y, loy));
    hit = vandq_u64(hit, vcltq_f64(y, hiy));
    hit = vandq_u64(hit, vcgtq_f64(z, loz));
    hit = vandq_u64(hit, vcltq_f64(z, hiz));
    emit(hit, i, out);
  }
  if (i < n) {
    std::vector<std::uint32_t> tail;
    scalar_ops().box_hits(px + i, py + i, pz + i, n - i, center, l, tail);
    for (std::uint32_t t : tail) {
      out.push_back(static_cast<std::uint32_t>(i) + t);
    }
  }
}

void slab_hits_neon(const double* px, const double* py, const double* pz,
                    const double* vx, const double* vy, const double* vz,
                    std::size_t n, const double center[3], const double l[3],
                    double t0, double t1, std::vector<std::uint32_t>& out) {
  const float64x2_t lox = vdupq_n_f64(center[0] - l[0]);
  const float64x2_t hix = vdupq_n_f64(center[0] + l[0]);
  const float64x2_t loy = vdupq_n_f64(center[1] - l[1]);
  const float64x2_t hiy = vdupq_n_f64(center[1] + l[1]);
  const float64x2_t loz = vdupq_n_f64(center[2] - l[2]);
  const float64x2_t hiz = vdupq_n_f64(center[2] + l[2]);
  const float64x2_t w0 = vdupq_n_f64(t0);
  const float64x2_t w1 = vdupq_n_f64(t1);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const Interval ix =
        axis_interval2<true>(vld1q_f64(px + i), vld1q_f64(vx + i), lox, hix);
    const Interval iy =
        axis_interval2<true>(vld1q_f64(py + i), vld1q_f64(vy + i), loy, hiy);
    const Interval iz =
        axis_interval2<true>(vld1q_f64(pz + i), vld1q_f64(vz + i), loz, hiz);
    const float64x2_t t_in = vmaxq_f64(ix.t_in, vmaxq_f64(iy.t_in, iz.t_in));
    const float64x2_t t_out = vminq_f64(ix.t_out, vminq_f64(iy.t_out, iz.t_out));
    uint64x2_t hit = vcltq_f64(t_in, t_out);
    hit = vandq_u64(hit, vcltq_f64(t_in, w1));
    hit = vandq_u64(hit, vcgtq_f64(t_out, w0));
    emit(hit, i, out);
  }
  if (i < n) {
    std::vector<std::uint32_t> tail;
    scalar_ops().slab_hits(px + i, py + i, pz + i, vx + i, vy + i, vz + i,
                           n - i, center, l, t0, t1, tail);
    for (std::uint32_t t : tail) {
      out.push_back(static_cast<std::uint32_t>(i) + t);
    }
  }
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops{crop_neon, box_hits_neon, slab_hits_neon};
  return ops;
}

}  // namespace evade::kernels

#endif  // __aarch64__
