#include "attackbench/diffnet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "attackbench/errors.hpp"
#include "attackbench/simd/kernels.hpp"

namespace attackbench {

bool operator==(const DenseLayer& a, const DenseLayer& b) {
  return a.in == b.in && a.out == b.out && a.weights == b.weights && a.bias == b.bias &&
         a.activation == b.activation;
}

void ModelParams::validate() const {
  if (input_dim == 0) throw FormatError("model input_dim must be positive");
  if (num_classes < 2) throw FormatError("model needs at least 2 classes");
  if (layers.empty()) throw FormatError("model has no layers");
  std::size_t width = input_dim;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.in != width) {
      throw FormatError("layer " + std::to_string(l) + " expects " + std::to_string(layer.in) +
                        " inputs, previous layer produces " + std::to_string(width));
    }
    if (layer.out == 0) throw FormatError("layer " + std::to_string(l) + " has no outputs");
    if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
      throw FormatError("layer " + std::to_string(l) + " parameter block has the wrong size");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
      throw FormatError("layer " + std::to_string(l) + " has non-finite parameters");
    }
    width = layer.out;
  }
  if (width != num_classes) {
    throw FormatError("final layer produces " + std::to_string(width) + " outputs, expected " +
                      std::to_string(num_classes));
  }
}

ForwardTrace forward(const ModelParams& model, std::span<const double> x) {
  if (x.size() != model.input_dim) {
    throw DimensionError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(model.input_dim));
  }
  const auto& k = simd::active();
  ForwardTrace trace;
  trace.inputs.reserve(model.layers.size());
  trace.pre_activations.reserve(model.layers.size());
  Vector current(x.begin(), x.end());
  for (const auto& layer : model.layers) {
    Vector pre(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      pre[r] = k.dot(layer.weights.data() + r * layer.in, current.data(), layer.in) + layer.bias[r];
    }
    Vector post = pre;
    if (layer.activation == Activation::ReLU) {
      for (auto& v : post) v = v > 0.0 ? v : 0.0;
    }
    trace.inputs.push_back(std::move(current));
    trace.pre_activations.push_back(std::move(pre));
    current = std::move(post);
  }
  trace.logits = std::move(current);
  return trace;
}

Vector gradient(const ModelParams& model, const ForwardTrace& trace, std::span<const double> seed) {
  if (trace.empty() || trace.inputs.size() != model.layers.size() ||
      trace.pre_activations.size() != model.layers.size() ||
      trace.logits.size() != model.num_classes) {
    throw StateError("gradient requires a forward trace of the same model");
  }
  if (seed.size() != model.num_classes) {
    throw DimensionError("gradient seed has length " + std::to_string(seed.size()) +
                         ", model has " + std::to_string(model.num_classes) + " classes");
  }
  const auto& k = simd::active();
  Vector upstream(seed.begin(), seed.end());
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const auto& layer = model.layers[l];
    if (layer.activation == Activation::ReLU) {
      const auto& pre = trace.pre_activations[l];
      for (std::size_t r = 0; r < layer.out; ++r) {
        if (!(pre[r] > 0.0)) upstream[r] = 0.0;
      }
    }
    Vector down(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (upstream[r] != 0.0) k.axpy(upstream[r], layer.weights.data() + r * layer.in, down.data(), layer.in);
    }
    upstream = std::move(down);
  }
  return upstream;
}

Vector gradient(const ModelParams& model, std::span<const double> x, std::span<const double> seed) {
  return gradient(model, forward(model, x), seed);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Label predict(const ModelParams& model, std::span<const double> x) {
  return static_cast<Label>(argmax(forward(model, x).logits));
}

}  // namespace attackbench
