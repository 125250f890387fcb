#include "evade/kernels.hpp"

#include <atomic>

namespace evade::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

namespace {

std::atomic<Backend> g_requested{Backend::kAuto};

Backend detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) {
    return Backend::kAvx2;
  }
  return Backend::kScalar;
#elif defined(__aarch64__)
  return Backend::kNeon;
#else
  return Backend::kScalar;
#endif
}

Backend resolve(Backend b) {
  if (b == Backend::kAuto) {
    return detect();
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::kAvx2 && !__builtin_cpu_supports("avx2")) {
    return Backend::kScalar;
  }
  if (b == Backend::kNeon) {
    return Backend::kScalar;
  }
#elif defined(__aarch64__)
  if (b == Backend::kAvx2) {
    return Backend::kScalar;
  }
#else
  return Backend::kScalar;
#endif
  return b;
}

}  // namespace

const Ops& ops() {
  switch (resolve(g_requested.load(std::memory_order_relaxed))) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::kAvx2:
      return avx2_ops();
#endif
#if defined(__aarch64__)
    case Backend::kNeon:
      return neon_ops();
#endif
    default:
      return scalar_ops();
  }
}

void set_backend(Backend b) { g_requested.store(b, std::memory_order_relaxed); }

Backend active_backend() {
  return resolve(g_requested.load(std::memory_order_relaxed));
}

std::string backend_name() {
  switch (active_backend()) {
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
    default:
      return "scalar";
  }
}

}  // namespace evade::kernels
