// Compiled with -mavx2 -mfma; only reached through the dispatch table after
// a CPUID check.

#include "attackbench/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace attackbench::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

// mul then add (no FMA) so the result is bitwise identical to the scalar loop.
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_abs_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(a + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double sum_sq_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

double max_abs_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(a + i)));
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void box_clip_avx2(const double* x, double* d, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vd = _mm256_loadu_pd(d + i);
    const __m256d v = _mm256_add_pd(vx, vd);
    vd = _mm256_blendv_pd(vd, _mm256_sub_pd(zero, vx), _mm256_cmp_pd(v, zero, _CMP_LT_OQ));
    vd = _mm256_blendv_pd(vd, _mm256_sub_pd(one, vx), _mm256_cmp_pd(v, one, _CMP_GT_OQ));
    _mm256_storeu_pd(d + i, vd);
  }
  for (; i < n; ++i) {
    const double v = x[i] + d[i];
    if (v < 0.0) d[i] = 0.0 - x[i];
    else if (v > 1.0) d[i] = 1.0 - x[i];
  }
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Level::Avx2, dot_avx2,    axpy_avx2,    sum_abs_avx2,
                             sum_sq_avx2, max_abs_avx2, box_clip_avx2};
}

}  // namespace attackbench::simd
