#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "attackbench/diffnet.hpp"

namespace testing {

using attackbench::Activation;
using attackbench::DenseLayer;
using attackbench::ModelParams;
using attackbench::Vector;

struct Gen {
  explicit Gen(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine); }
  Vector vec(std::size_t n, double lo, double hi) {
    Vector v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }
  std::mt19937_64 engine;
};

inline DenseLayer layer(std::size_t in, std::size_t out, Activation act, Gen& g, double scale = 1.0) {
  DenseLayer l;
  l.in = in;
  l.out = out;
  l.activation = act;
  l.weights = g.vec(in * out, -scale, scale);
  l.bias = g.vec(out, -0.5 * scale, 0.5 * scale);
  return l;
}

// Dense net with `depth` layers (ReLU hidden, linear output).
inline ModelParams random_model(Gen& g, std::size_t d, std::size_t classes, std::size_t depth,
                                std::size_t max_width = 8) {
  ModelParams m;
  m.input_dim = d;
  m.num_classes = classes;
  std::size_t in = d;
  for (std::size_t l = 0; l < depth; ++l) {
    const bool last = l + 1 == depth;
    const std::size_t out = last ? classes : 2 + g.below(max_width - 1);
    m.layers.push_back(layer(in, out, last ? Activation::Identity : Activation::ReLU, g));
    in = out;
  }
  return m;
}

// logits = W x + b, a single linear layer.
inline ModelParams linear_model(std::size_t d, std::size_t classes, Vector weights, Vector bias) {
  ModelParams m;
  m.input_dim = d;
  m.num_classes = classes;
  DenseLayer l;
  l.in = d;
  l.out = classes;
  l.activation = Activation::Identity;
  l.weights = std::move(weights);
  l.bias = std::move(bias);
  m.layers.push_back(std::move(l));
  return m;
}

// Binary linear model: class 1 iff w.x + b > 0.
inline ModelParams binary_linear(const Vector& w, double b) {
  Vector weights(2 * w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) weights[w.size() + i] = w[i];
  return linear_model(w.size(), 2, std::move(weights), {0.0, b});
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("attackbench_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
