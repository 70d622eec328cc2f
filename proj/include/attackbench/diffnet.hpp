#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "attackbench/types.hpp"

namespace attackbench {

enum class Activation { Identity, ReLU };

// One dense layer: out = act(W in + b), W stored row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::Identity;

  std::span<const double> row(std::size_t r) const { return {weights.data() + r * in, in}; }
};

struct ModelParams {
  std::size_t input_dim = 0;
  std::size_t num_classes = 0;
  std::vector<DenseLayer> layers;

  // Throws FormatError when dimensions do not chain or entries are not finite.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

bool operator==(const DenseLayer& a, const DenseLayer& b);

// Layer inputs and pre-activations recorded by forward(), replayed by
// gradient().
struct ForwardTrace {
  Vector logits;
  std::vector<Vector> inputs;          // inputs[l] feeds layer l
  std::vector<Vector> pre_activations; // W in + b of layer l

  bool empty() const { return inputs.empty(); }
};

ForwardTrace forward(const ModelParams& model, std::span<const double> x);

// d(seed . logits)/dx by reverse accumulation through `trace`. Throws
// StateError if the trace does not belong to a forward pass of `model`.
Vector gradient(const ModelParams& model, const ForwardTrace& trace, std::span<const double> seed);

// forward + gradient in one call.
Vector gradient(const ModelParams& model, std::span<const double> x, std::span<const double> seed);

// First maximal index.
std::size_t argmax(std::span<const double> values);

Label predict(const ModelParams& model, std::span<const double> x);

// Model files. The byte layout is described in docs/model_format.md. Weights
// are stored as float32, so save() rounds and load() upcasts.
void save_model(const ModelParams& model, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

std::vector<unsigned char> encode_model(const ModelParams& model);
ModelParams decode_model(std::span<const unsigned char> bytes);

}  // namespace attackbench
