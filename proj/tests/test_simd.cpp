#include <cmath>
#include <cstring>

#include "attackbench/simd/kernels.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace attackbench::simd;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("scalar level is always supported and listed first") {
  CHECK(supported(Level::Scalar));
  const auto levels = supported_levels();
  REQUIRE(!levels.empty());
  CHECK(levels.front() == Level::Scalar);
  CHECK(table(Level::Scalar).level == Level::Scalar);
  CHECK(supported(active().level));
}

TEST_CASE("every supported level matches the scalar kernels") {
  const KernelTable& ref = table(Level::Scalar);
  testing::Gen g(11);
  for (Level level : supported_levels()) {
    CAPTURE(to_string(level));
    const KernelTable& k = table(level);
    for (std::size_t n = 0; n <= 67; ++n) {
      CAPTURE(n);
      const auto a = g.vec(n, -3.0, 3.0);
      const auto b = g.vec(n, -3.0, 3.0);
      const double alpha = g.uniform(-2.0, 2.0);

      const double scale = 1.0 + ref.sum_abs(a.data(), n) * 3.0;
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-13 * scale);
      CHECK(std::abs(k.sum_sq(a.data(), n) - ref.sum_sq(a.data(), n)) <= 1e-13 * scale * 3.0);
      CHECK(std::abs(k.sum_abs(a.data(), n) - ref.sum_abs(a.data(), n)) <= 1e-13 * scale);
      CHECK(k.max_abs(a.data(), n) == ref.max_abs(a.data(), n));

      auto y1 = b, y2 = b;
      k.axpy(alpha, a.data(), y1.data(), n);
      ref.axpy(alpha, a.data(), y2.data(), n);
      CHECK(bitwise_equal(y1, y2));

      const auto x = g.vec(n, 0.0, 1.0);
      auto d1 = g.vec(n, -1.5, 1.5);
      auto d2 = d1;
      k.box_clip(x.data(), d1.data(), n);
      ref.box_clip(x.data(), d2.data(), n);
      CHECK(bitwise_equal(d1, d2));
    }
  }
}

TEST_CASE("scalar kernels compute the textbook values") {
  const KernelTable& k = table(Level::Scalar);
  const double a[] = {1.0, -2.0, 3.0};
  const double b[] = {4.0, 5.0, -6.0};
  CHECK(k.dot(a, b, 3) == -24.0);
  CHECK(k.sum_abs(a, 3) == 6.0);
  CHECK(k.sum_sq(a, 3) == 14.0);
  CHECK(k.max_abs(a, 3) == 3.0);
  CHECK(k.max_abs(a, 0) == 0.0);
  double y[] = {1.0, 1.0, 1.0};
  k.axpy(2.0, a, y, 3);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == -3.0);
  CHECK(y[2] == 7.0);
  const double x[] = {0.9, 0.1, 0.5};
  double d[] = {0.5, -0.5, 0.25};
  k.box_clip(x, d, 3);
  CHECK(d[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(d[2] == 0.25);
}
