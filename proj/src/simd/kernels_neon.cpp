#include "attackbench/simd/kernels.hpp"

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace attackbench::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_abs_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabsq_f64(vld1q_f64(a + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double sum_sq_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(a + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

double max_abs_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(a + i)));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void box_clip_neon(const double* x, double* d, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    float64x2_t vd = vld1q_f64(d + i);
    const float64x2_t v = vaddq_f64(vx, vd);
    vd = vbslq_f64(vcltq_f64(v, zero), vsubq_f64(zero, vx), vd);
    vd = vbslq_f64(vcgtq_f64(v, one), vsubq_f64(one, vx), vd);
    vst1q_f64(d + i, vd);
  }
  for (; i < n; ++i) {
    const double v = x[i] + d[i];
    if (v < 0.0) d[i] = 0.0 - x[i];
    else if (v > 1.0) d[i] = 1.0 - x[i];
  }
}

}  // namespace

namespace detail {
const KernelTable kNeonTable{Level::Neon, dot_neon,    axpy_neon,    sum_abs_neon,
                             sum_sq_neon, max_abs_neon, box_clip_neon};
}

}  // namespace attackbench::simd
