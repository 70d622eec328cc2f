#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace attackbench::simd {

enum class Level { Scalar, Avx2, Neon };

std::string_view to_string(Level level);

// Inner loops shared by the network kernel, the projections and the
// distance computations. Every level computes the same function; only the
// summation order of the reductions may differ (see tests/test_simd.cpp).
struct KernelTable {
  Level level;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum_abs)(const double* a, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  // out[i] = clamp(x[i] + d[i], 0, 1) - x[i]
  void (*box_clip)(const double* x, double* d, std::size_t n);
};

// Table selected at first use. ATTACKBENCH_SIMD=scalar|avx2|neon forces a
// level (falls back to scalar when the CPU lacks it); unset means best
// available.
const KernelTable& active();

const KernelTable& table(Level level);
bool supported(Level level);
std::vector<Level> supported_levels();

// Convenience wrappers over active().
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum_abs(std::span<const double> a) { return active().sum_abs(a.data(), a.size()); }
inline double sum_sq(std::span<const double> a) { return active().sum_sq(a.data(), a.size()); }
inline double max_abs(std::span<const double> a) { return active().max_abs(a.data(), a.size()); }

namespace detail {
extern const KernelTable kScalarTable;
#if defined(ATTACKBENCH_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(ATTACKBENCH_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace attackbench::simd
