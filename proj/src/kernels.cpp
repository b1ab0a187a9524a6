// Runtime kernel selection.

#include "laat/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace laat::kernels {

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

namespace {

const Ops& pick() {
  const char* forced = std::getenv("LAAT_KERNELS");
  if (forced != nullptr) {
    if (std::strcmp(forced, "scalar") == 0) return scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
    if (std::strcmp(forced, "avx2") == 0 && cpu_has_avx2()) return avx2_ops();
#endif
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return avx2_ops();
#endif
  return scalar_ops();
}

}  // namespace

const Ops& ops() {
  static const Ops& selected = pick();
  return selected;
}

}  // namespace laat::kernels
