#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "attackbench/attack.hpp"
#include "attackbench/dataset.hpp"
#include "attackbench/diffnet.hpp"

namespace attackbench {

// Hidden layer widths; every hidden layer uses ReLU, the output layer is
// linear. An empty list gives a linear classifier.
struct Architecture {
  std::vector<std::size_t> hidden;
};

struct TrainParams {
  int epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
};

// Minibatch SGD on softmax cross-entropy with seed-driven He-uniform init and
// per-epoch shuffling. With `adversarial` set, each minibatch sample is
// replaced by the attack's final iterate against the current parameters
// before the gradient step. Parameters are rounded to float32 on return so
// the result survives save_model/load_model unchanged. Throws DataError on
// an empty dataset.
ModelParams train(const Dataset& data, const Architecture& arch, const TrainParams& params,
                  const std::optional<AttackConfig>& adversarial, std::uint64_t seed);

double accuracy(const ModelParams& model, const Dataset& data);

}  // namespace attackbench
