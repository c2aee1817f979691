#include <cstdlib>
#include <string_view>

#include "fluency/simd/kernels.hpp"

namespace fluency::simd {

std::vector<const Kernels*> available_kernels() {
  std::vector<const Kernels*> out{&scalar_kernels()};
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    out.push_back(&detail::avx2_kernels());
  }
#endif
#if defined(__aarch64__)
  out.push_back(&detail::neon_kernels());
#endif
  return out;
}

const Kernels& active_kernels() {
  static const Kernels& chosen = [] () -> const Kernels& {
    const auto tables = available_kernels();
    if (const char* want = std::getenv("FLUENCY_SIMD")) {
      for (const Kernels* k : tables) {
        if (std::string_view(k->name) == want) return *k;
      }
    }
    return *tables.back();
  }();
  return chosen;
}

}  // namespace fluency::simd
