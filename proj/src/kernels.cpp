#include "soup/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace soup::kernels {

const KernelTable* avx2_table() {
#if defined(SOUP_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
           __builtin_cpu_supports("popcnt");
  }();
  return supported ? &detail::avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const KernelTable* t = avx2_table()) out.push_back(t);
  return out;
}

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    if (const char* env = std::getenv("SOUPBENCH_SIMD");
        env != nullptr && std::string_view(env) == "scalar") {
      return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace soup::kernels
