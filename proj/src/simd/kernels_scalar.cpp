#include "attackbench/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace attackbench::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_abs_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void box_clip_scalar(const double* x, double* d, std::size_t n) {
  // Coordinates already inside the box are left bit-for-bit unchanged.
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i] + d[i];
    if (v < 0.0) d[i] = 0.0 - x[i];
    else if (v > 1.0) d[i] = 1.0 - x[i];
  }
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Level::Scalar, dot_scalar,    axpy_scalar,    sum_abs_scalar,
                               sum_sq_scalar, max_abs_scalar, box_clip_scalar};
}

}  // namespace attackbench::simd
