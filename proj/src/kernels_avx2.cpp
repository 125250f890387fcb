#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <limits>

#include "evade/kernels.hpp"

namespace evade::kernels {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  __m256d t_in;
  __m256d t_out;
};

// Per-axis slab interval for 4 points. strict selects open/closed membership
// for zero-velocity lanes.
template <bool Strict>
inline Interval axis_interval4(__m256d p, __m256d v, __m256d lo, __m256d hi) {
  const __m256d ta = _mm256_div_pd(_mm256_sub_pd(lo, p), v);
  const __m256d tb = _mm256_div_pd(_mm256_sub_pd(hi, p), v);
  __m256d ti = _mm256_min_pd(ta, tb);
  __m256d to = _mm256_max_pd(ta, tb);

  const __m256d zero = _mm256_setzero_pd();
  const __m256d vzero = _mm256_cmp_pd(v, zero, _CMP_EQ_OQ);
  __m256d inside;
  if (Strict) {
    inside = _mm256_and_pd(_mm256_cmp_pd(p, lo, _CMP_GT_OQ),
                           _mm256_cmp_pd(p, hi, _CMP_LT_OQ));
  } else {
    inside = _mm256_and_pd(_mm256_cmp_pd(p, lo, _CMP_GE_OQ),
                           _mm256_cmp_pd(p, hi, _CMP_LE_OQ));
  }
  const __m256d pinf = _mm256_set1_pd(kInf);
  const __m256d ninf = _mm256_set1_pd(-kInf);
  const __m256d ti0 = _mm256_blendv_pd(pinf, ninf, inside);
  const __m256d to0 = _mm256_blendv_pd(ninf, pinf, inside);
  ti = _mm256_blendv_pd(ti, ti0, vzero);
  to = _mm256_blendv_pd(to, to0, vzero);
  return {ti, to};
}

inline void emit(unsigned mask, std::size_t base,
                 std::vector<std::uint32_t>& out) {
  while (mask) {
    const int bit = __builtin_ctz(mask);
    out.push_back(static_cast<std::uint32_t>(base + bit));
    mask &= mask - 1;
  }
}

void crop_avx2(const double* px, const double* py, const double* pz,
               const double* vx, const double* vy, const double* vz,
               std::size_t n, const double lo[3], const double hi[3],
               double horizon, std::vector<std::uint32_t>& out) {
  const __m256d lox = _mm256_set1_pd(lo[0]), hix = _mm256_set1_pd(hi[0]);
  const __m256d loy = _mm256_set1_pd(lo[1]), hiy = _mm256_set1_pd(hi[1]);
  const __m256d loz = _mm256_set1_pd(lo[2]), hiz = _mm256_set1_pd(hi[2]);
  const __m256d t0 = _mm256_setzero_pd();
  const __m256d t1 = _mm256_set1_pd(horizon);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Interval ix = axis_interval4<false>(
        _mm256_loadu_pd(px + i), _mm256_loadu_pd(vx + i), lox, hix);
    const Interval iy = axis_interval4<false>(
        _mm256_loadu_pd(py + i), _mm256_loadu_pd(vy + i), loy, hiy);
    const Interval iz = axis_interval4<false>(
        _mm256_loadu_pd(pz + i), _mm256_loadu_pd(vz + i), loz, hiz);
    const __m256d t_in =
        _mm256_max_pd(t0, _mm256_max_pd(ix.t_in, _mm256_max_pd(iy.t_in, iz.t_in)));
    const __m256d t_out =
        _mm256_min_pd(t1, _mm256_min_pd(ix.t_out, _mm256_min_pd(iy.t_out, iz.t_out)));
    const __m256d hit = _mm256_cmp_pd(t_in, t_out, _CMP_LE_OQ);
    emit(static_cast<unsigned>(_mm256_movemask_pd(hit)), i, out);
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

void box_hits_avx2(const double* px, const double* py, const double* pz,
                   std::size_t n, const double center[3], const double l[3],
                   std::vector<std::uint32_t>& out) {
  const __m256d lox = _mm256_set1_pd(center[0] - l[0]);
  const __m256d hix = _mm256_set1_pd(center[0] + l[0]);
  const __m256d loy = _mm256_set1_pd(center[1] - l[1]);
  const __m256d hiy = _mm256_set1_pd(center[1] + l[1]);
  const __m256d loz = _mm256_set1_pd(center[2] - l[2]);
  const __m256d hiz = _mm256_set1_pd(center[2] + l[2]);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(px + i);
    const __m256d y = _mm256_loadu_pd(py + i);
    const __m256d z = _mm256_loadu_pd(pz + i);
    __m256d hit = _mm256_and_pd(_mm256_cmp_pd(x, lox, _CMP_GT_OQ),
                                _mm256_cmp_pd(x, hix, _CMP_LT_OQ));
    hit = _mm256_and_pd(hit, _mm256_cmp_pd(y, loy, _CMP_GT_OQ));
    hit = _mm256_and_pd(hit, _mm256_cmp_pd(y, hiy, _CMP_LT_OQ));
    hit = _mm256_and_pd(hit, _mm256_cmp_pd(z, loz, _CMP_GT_OQ));
    hit = _mm256_and_pd(hit, _mm256_cmp_pd(z, hiz, _CMP_LT_OQ));
    emit(static_cast<unsigned>(_mm256_movemask_pd(hit)), i, out);
  }
  if (i < n) {
    std::vector<std::uint32_t> tail;
    scalar_ops().box_hits(px + i, py + i, pz + i, n - i, center, l, tail);
    for (std::uint32_t t : tail) {
      out.push_back(static_cast<std::uint32_t>(i) + t);
    }
  }
}

void slab_hits_avx2(const double* px, const double* py, const double* pz,
                    const double* vx, const double* vy, const double* vz,
                    std::size_t n, const double center[3], const double l[3],
                    double t0, double t1, std::vector<std::uint32_t>& out) {
  const double lo[3] = {center[0] - l[0], center[1] - l[1], center[2] - l[2]};
  const double hi[3] = {center[0] + l[0], center[1] + l[1], center[2] + l[2]};
  const __m256d lox = _mm256_set1_pd(lo[0]), hix = _mm256_set1_pd(hi[0]);
  const __m256d loy = _mm256_set1_pd(lo[1]), hiy = _mm256_set1_pd(hi[1]);
  const __m256d loz = _mm256_set1_pd(lo[2]), hiz = _mm256_set1_pd(hi[2]);
  const __m256d w0 = _mm256_set1_pd(t0);
  const __m256d w1 = _mm256_set1_pd(t1);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Interval ix = axis_interval4<true>(
        _mm256_loadu_pd(px + i), _mm256_loadu_pd(vx + i), lox, hix);
    const Interval iy = axis_interval4<true>(
        _mm256_loadu_pd(py + i), _mm256_loadu_pd(vy + i), loy, hiy);
    const Interval iz = axis_interval4<true>(
        _mm256_loadu_pd(pz + i), _mm256_loadu_pd(vz + i), loz, hiz);
    const __m256d t_in =
        _mm256_max_pd(ix.t_in, _mm256_max_pd(iy.t_in, iz.t_in));
    const __m256d t_out =
        _mm256_min_pd(ix.t_out, _mm256_min_pd(iy.t_out, iz.t_out));
    __m256d hit = _mm256_cmp_pd(t_in, t_out, _CMP_LT_OQ);
    hit = _mm256_and_pd(hit, _mm256_cmp_pd(t_in, w1, _CMP_LT_OQ));
    hit = _mm256_and_pd(hit, _mm256_cmp_pd(t_out, w0, _CMP_GT_OQ));
    emit(static_cast<unsigned>(_mm256_movemask_pd(hit)), i, out);
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

const Ops& avx2_ops() {
  static const Ops ops{crop_avx2, box_hits_avx2, slab_hits_avx2};
  return ops;
}

}  // namespace evade::kernels

#endif  // x86_64
