#include <cmath>
#include <fstream>

#include "attackbench/diffnet.hpp"
#include "attackbench/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace attackbench;
using testing::Gen;

namespace {

ModelParams single(std::size_t n, Vector w, Vector b, Activation act) {
  auto m = testing::linear_model(n, n, std::move(w), std::move(b));
  m.layers[0].activation = act;
  return m;
}

ModelParams rounded(ModelParams m) {
  for (auto& l : m.layers) {
    for (double& w : l.weights) w = static_cast<float>(w);
    for (double& b : l.bias) b = static_cast<float>(b);
  }
  return m;
}

}  // namespace

TEST_CASE("forward on hand-checked layers") {
  auto id = single(2, {1, 0, 0, 1}, {0, 0}, Activation::Identity);
  CHECK(forward(id, Vector{0.3, 0.7}).logits == Vector{0.3, 0.7});

  auto m = single(2, {1, -1, 0, 2}, {0.5, 0}, Activation::Identity);
  CHECK(forward(m, Vector{1, 1}).logits == Vector{0.5, 2.0});

  auto relu = single(2, {-1, 0, 0, -1}, {0, 0}, Activation::ReLU);
  const auto t = forward(relu, Vector{0.3, 0.7});
  CHECK(t.pre_activations[0] == Vector{-0.3, -0.7});
  CHECK(t.logits == Vector{0.0, 0.0});
}

TEST_CASE("forward rejects a wrong input dimension") {
  auto m = single(2, {1, 0, 0, 1}, {0, 0}, Activation::Identity);
  CHECK_THROWS_AS(forward(m, Vector{1.0}), DimensionError);
  CHECK_THROWS_AS(predict(m, Vector{1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("gradient of a linear model is the seeded weight row") {
  Gen g(3);
  auto m = testing::linear_model(4, 3, g.vec(12, -1, 1), g.vec(3, -1, 1));
  const Vector x = g.vec(4, 0, 1);
  for (std::size_t c = 0; c < 3; ++c) {
    Vector seed(3, 0.0);
    seed[c] = 1.0;
    const Vector grad = gradient(m, x, seed);
    for (std::size_t i = 0; i < 4; ++i) CHECK(grad[i] == m.layers[0].weights[c * 4 + i]);
  }
  const Vector zero = gradient(m, x, Vector(3, 0.0));
  for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("gradient needs a trace from forward") {
  Gen g(4);
  auto m = testing::random_model(g, 3, 2, 2);
  CHECK_THROWS_AS(gradient(m, ForwardTrace{}, Vector{1.0, 0.0}), StateError);
  const auto t = forward(m, Vector{0.1, 0.2, 0.3});
  CHECK_THROWS_AS(gradient(m, t, Vector{1.0}), DimensionError);
}

TEST_CASE("gradient matches central differences on random ReLU nets") {
  Gen g(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + g.below(6);
    const std::size_t c = 2 + g.below(3);
    auto m = testing::random_model(g, d, c, 2);
    const Vector x = g.vec(d, 0, 1);
    const Vector seed = g.vec(c, -1, 1);
    const Vector grad = gradient(m, x, seed);
    const auto objective = [&](const Vector& p) {
      const auto f = forward(m, p).logits;
      double s = 0;
      for (std::size_t k = 0; k < c; ++k) s += seed[k] * f[k];
      return s;
    };
    for (std::size_t i = 0; i < d; ++i) {
      Vector hi = x, lo = x;
      hi[i] += 1e-4;
      lo[i] -= 1e-4;
      const double fd = (objective(hi) - objective(lo)) / 2e-4;
      if (std::abs(grad[i]) > 1e-6) CHECK(std::abs(fd - grad[i]) / std::abs(grad[i]) < 1e-3);
    }
  }
}

TEST_CASE("dead ReLU units pass no gradient") {
  // Hidden unit 0 is always off (negative bias, zero weights); unit 1 is the
  // identity on x1. Output sums both.
  ModelParams m;
  m.input_dim = 2;
  m.num_classes = 2;
  m.layers.push_back({2, 2, {5.0, 0.0, 0.0, 1.0}, {-100.0, 0.0}, Activation::ReLU});
  m.layers.push_back({2, 2, {1.0, 1.0, 0.0, 0.0}, {0.0, 0.0}, Activation::Identity});
  const Vector grad = gradient(m, Vector{0.5, 0.5}, Vector{1.0, 0.0});
  CHECK(grad[0] == 0.0);
  CHECK(grad[1] == 1.0);
}

TEST_CASE("argmax and predict break ties to the lowest index") {
  CHECK(argmax(Vector{0.3, 0.7}) == 1);
  CHECK(argmax(Vector{0.5, 0.5}) == 0);
  CHECK(argmax(Vector{2, 0.5, -1}) == 0);
  auto m = single(2, {1, 0, 0, 1}, {0, 0}, Activation::Identity);
  CHECK(predict(m, Vector{0.4, 0.4}) == 0);
  CHECK(predict(m, Vector{0.3, 0.7}) == 1);
}

TEST_CASE("forward and predict are repeatable") {
  Gen g(6);
  auto m = testing::random_model(g, 5, 3, 3);
  const Vector x = g.vec(5, 0, 1);
  CHECK(forward(m, x).logits == forward(m, x).logits);
  CHECK(predict(m, x) == predict(m, x));
}

TEST_CASE("model files round-trip float32 parameters exactly") {
  Gen g(7);
  const auto dir = testing::temp_dir("model");
  for (int i = 0; i < 5; ++i) {
    auto m = rounded(testing::random_model(g, 1 + g.below(5), 2 + g.below(3), 1 + g.below(3)));
    save_model(m, dir / "m.abnet");
    CHECK(load_model(dir / "m.abnet") == m);
    CHECK(decode_model(encode_model(m)) == m);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed model files raise FormatError") {
  const auto dir = testing::temp_dir("badmodel");
  { std::ofstream(dir / "empty.abnet"); }
  CHECK_THROWS_AS(load_model(dir / "empty.abnet"), FormatError);
  CHECK_THROWS_AS(load_model(dir / "missing.abnet"), IoError);

  Gen g(8);
  auto m = rounded(testing::random_model(g, 3, 2, 2));
  auto bytes = encode_model(m);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_model(truncated), FormatError);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_model(trailing), FormatError);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_model(bad_magic), FormatError);

  // Layer headers follow the 6-byte magic and three u32 fields; each is
  // u32 out, u32 in, u8 activation. Make layer 1's input width disagree.
  auto mismatched = bytes;
  mismatched[18 + 9 + 4] += 1;
  CHECK_THROWS_AS(decode_model(mismatched), FormatError);

  auto broken = m;
  broken.layers[1].in += 1;
  broken.layers[1].weights.resize(broken.layers[1].in * broken.layers[1].out, 0.0);
  CHECK_THROWS(broken.validate());
  std::filesystem::remove_all(dir);
}
