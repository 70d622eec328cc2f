#include <cstdlib>
#include <string>

#include "attackbench/simd/kernels.hpp"

namespace attackbench::simd {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
    case Level::Neon: return "neon";
  }
  return "scalar";
}

bool supported(Level level) {
  switch (level) {
    case Level::Scalar: return true;
    case Level::Avx2:
#if defined(ATTACKBENCH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Level::Neon:
#if defined(ATTACKBENCH_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Level level) {
  if (!supported(level)) return detail::kScalarTable;
  switch (level) {
#if defined(ATTACKBENCH_HAVE_AVX2)
    case Level::Avx2: return detail::kAvx2Table;
#endif
#if defined(ATTACKBENCH_HAVE_NEON)
    case Level::Neon: return detail::kNeonTable;
#endif
    default: return detail::kScalarTable;
  }
}

std::vector<Level> supported_levels() {
  std::vector<Level> out;
  for (Level l : {Level::Scalar, Level::Avx2, Level::Neon}) {
    if (supported(l)) out.push_back(l);
  }
  return out;
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("ATTACKBENCH_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return table(Level::Scalar);
    if (want == "avx2") return table(Level::Avx2);
    if (want == "neon") return table(Level::Neon);
  }
  if (supported(Level::Avx2)) return table(Level::Avx2);
  if (supported(Level::Neon)) return table(Level::Neon);
  return table(Level::Scalar);
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& t = select();
  return t;
}

}  // namespace attackbench::simd
