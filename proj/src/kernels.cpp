#include <cstdlib>
#include <string>

#include "sgn/kernels.hpp"

namespace sgn::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table& active() {
  static const Table& table = [&]() -> const Table& {
    const char* env = std::getenv("SGN_SIMD");
    const bool force_scalar = env != nullptr && std::string(env) == "scalar";
    if (!force_scalar && cpu_has_avx2() && avx2_table() != nullptr) return *avx2_table();
    return scalar_table();
  }();
  return table;
}

std::string_view to_string(Level level) {
  return level == Level::avx2 ? "avx2" : "scalar";
}

}  // namespace sgn::kernels
