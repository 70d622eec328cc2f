#include <algorithm>
#include <cmath>
#include <numeric>

#include "attackbench/benchmodel.hpp"
#include "attackbench/errors.hpp"
#include "attackbench/train.hpp"
#include "rng.hpp"

namespace attackbench {

namespace {

ModelParams init_model(std::size_t d, std::size_t classes, const Architecture& arch, Rng& rng) {
  ModelParams m;
  m.input_dim = d;
  m.num_classes = classes;
  std::size_t in = d;
  std::vector<std::size_t> widths = arch.hidden;
  widths.push_back(classes);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    DenseLayer layer;
    layer.in = in;
    layer.out = widths[l];
    layer.activation = l + 1 == widths.size() ? Activation::Identity : Activation::ReLU;
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    layer.weights.resize(layer.out * layer.in);
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    layer.bias.assign(layer.out, 0.0);
    m.layers.push_back(std::move(layer));
    in = widths[l];
  }
  return m;
}

// Accumulates d(cross-entropy)/d(params) for one sample into grads.
void accumulate(const ModelParams& m, std::span<const double> x, Label y, std::vector<DenseLayer>& grads) {
  const ForwardTrace trace = forward(m, x);
  const auto& f = trace.logits;
  const double mx = *std::max_element(f.begin(), f.end());
  Vector up(f.size());
  double z = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) z += (up[c] = std::exp(f[c] - mx));
  for (double& v : up) v /= z;
  up[y] -= 1.0;

  for (std::size_t l = m.layers.size(); l-- > 0;) {
    const auto& layer = m.layers[l];
    const auto& pre = trace.pre_activations[l];
    const auto& in = trace.inputs[l];
    if (layer.activation == Activation::ReLU) {
      for (std::size_t r = 0; r < layer.out; ++r) {
        if (pre[r] <= 0.0) up[r] = 0.0;
      }
    }
    auto& g = grads[l];
    Vector down(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double u = up[r];
      if (u == 0.0) continue;
      g.bias[r] += u;
      double* gw = g.weights.data() + r * layer.in;
      const double* w = layer.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) {
        gw[c] += u * in[c];
        down[c] += u * w[c];
      }
    }
    up = std::move(down);
  }
}

Vector perturb(const ModelParams& m, const AttackConfig& attack, const Sample& s, std::uint64_t seed) {
  AttackConfig cfg = attack;
  cfg.seed = seed;
  try {
    BenchModel bm(m, static_cast<std::uint64_t>(2 * cfg.steps + 4), cfg.p, s.x, s.label);
    return run_attack(cfg, bm).last;
  } catch (const InitError&) {
    return s.x;
  }
}

}  // namespace

double accuracy(const ModelParams& model, const Dataset& data) {
  if (data.samples.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& s : data.samples) hit += predict(model, s.x) == s.label;
  return static_cast<double>(hit) / static_cast<double>(data.samples.size());
}

ModelParams train(const Dataset& data, const Architecture& arch, const TrainParams& params,
                  const std::optional<AttackConfig>& adversarial, std::uint64_t seed) {
  if (data.samples.empty()) throw DataError("cannot train on an empty dataset");
  data.validate();
  if (params.epochs < 0 || params.batch_size == 0 || !(params.learning_rate > 0.0)) {
    throw ConfigError("invalid training hyperparameters");
  }
  if (adversarial) {
    adversarial->validate();
    if (adversarial->mode == AttackMode::FixedBudget && !adversarial->epsilon) {
      throw ConfigError("adversarial training needs a FixedBudget attack with epsilon set");
    }
  }

  Rng rng(seed);
  ModelParams m = init_model(data.dim, data.num_classes, arch, rng);
  std::vector<DenseLayer> grads = m.layers;
  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t draw = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      const std::size_t stop = std::min(order.size(), start + params.batch_size);
      for (auto& g : grads) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.bias.begin(), g.bias.end(), 0.0);
      }
      for (std::size_t k = start; k < stop; ++k) {
        const Sample& s = data.samples[order[k]];
        if (adversarial) {
          const Vector xa = perturb(m, *adversarial, s, mix_seed(seed, draw++));
          accumulate(m, xa, s.label, grads);
        } else {
          accumulate(m, s.x, s.label, grads);
        }
      }
      const double scale = params.learning_rate / static_cast<double>(stop - start);
      for (std::size_t l = 0; l < m.layers.size(); ++l) {
        auto& layer = m.layers[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= scale * grads[l].weights[i];
        for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= scale * grads[l].bias[i];
      }
    }
  }

  for (auto& layer : m.layers) {
    for (double& w : layer.weights) w = static_cast<double>(static_cast<float>(w));
    for (double& b : layer.bias) b = static_cast<double>(static_cast<float>(b));
  }
  m.validate();
  return m;
}

}  // namespace attackbench
