#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "dimers/simd.hpp"

namespace dimers::simd {

namespace {

Level env_or_detected() {
  Level best = detected();
  if (const char* e = std::getenv("DIMERS_SIMD")) {
    if (std::strcmp(e, "scalar") == 0) return Level::scalar;
  }
  return best;
}

std::atomic<Level>& active_slot() {
  static std::atomic<Level> lvl{env_or_detected()};
  return lvl;
}

}  // namespace

bool available(Level l) {
  switch (l) {
    case Level::scalar:
      return true;
    case Level::avx2:
#if defined(DIMERS_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Level::neon:
#if defined(DIMERS_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Level detected() {
  if (available(Level::avx2)) return Level::avx2;
  if (available(Level::neon)) return Level::neon;
  return Level::scalar;
}

Level active() { return active_slot().load(); }

void set_active(Level l) {
  if (!available(l)) throw std::runtime_error(std::string("SIMD level unavailable: ") + name(l));
  active_slot().store(l);
}

const Kernels& kernels(Level l) {
  switch (l) {
#if defined(DIMERS_HAVE_AVX2)
    case Level::avx2:
      if (available(l)) return kernels_avx2();
      break;
#endif
#if defined(DIMERS_HAVE_NEON)
    case Level::neon:
      return kernels_neon();
#endif
    default:
      break;
  }
  return kernels_scalar();
}

const Kernels& kernels() { return kernels(active()); }

const char* name(Level l) {
  switch (l) {
    case Level::scalar:
      return "scalar";
    case Level::avx2:
      return "avx2";
    case Level::neon:
      return "neon";
  }
  return "?";
}

}  // namespace dimers::simd
