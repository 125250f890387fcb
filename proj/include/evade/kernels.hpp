#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace evade::kernels {

// Batch kernels over SoA point data. Scalar reference implementations define
// the semantics; the SIMD variants must match them bit-for-bit on the
// produced index lists.

// Points inside [lo, hi] (inclusive), or, when moving, whose constant-velocity
// segment over [0, horizon] touches the box (non-strict slab test).
using CropFn = void (*)(const double* px, const double* py, const double* pz,
                        const double* vx, const double* vy, const double* vz,
                        std::size_t n, const double lo[3], const double hi[3],
                        double horizon, std::vector<std::uint32_t>& out);

// Points strictly inside the open box center +- l in every axis.
using BoxHitsFn = void (*)(const double* px, const double* py, const double* pz,
                           std::size_t n, const double center[3],
                           const double l[3], std::vector<std::uint32_t>& out);

// Moving points whose line crosses the open box center +- l during (t0, t1):
// strict per-axis entry/exit overlap intersected with the window.
using SlabHitsFn = void (*)(const double* px, const double* py, const double* pz,
                            const double* vx, const double* vy, const double* vz,
                            std::size_t n, const double center[3],
                            const double l[3], double t0, double t1,
                            std::vector<std::uint32_t>& out);

struct Ops {
  CropFn crop;
  BoxHitsFn box_hits;
  SlabHitsFn slab_hits;
};

enum class Backend { kAuto, kScalar, kAvx2, kNeon };

/// Active kernel table (selected at startup, overridable for tests/bench).
const Ops& ops();
const Ops& scalar_ops();

void set_backend(Backend b);
Backend active_backend();
std::string backend_name();

}  // namespace evade::kernels
