#include "attackbench/benchmodel.hpp"

#include <algorithm>
#include <string>

#include "attackbench/errors.hpp"
#include "attackbench/metrics.hpp"

namespace attackbench {

BenchModel::BenchModel(const ModelParams& model, std::uint64_t budget, Norm p, Vector x, Label y)
    : model_(&model), budget_(budget), p_(p), x_(std::move(x)), y_(y) {
  if (budget_ == 0) throw ConfigError("query budget must be at least 1");
  if (x_.size() != model.input_dim) {
    throw DimensionError("sample has dimension " + std::to_string(x_.size()) + ", model expects " +
                         std::to_string(model.input_dim));
  }
  if (y_ < 0 || static_cast<std::size_t>(y_) >= model.num_classes) {
    throw DataError("label " + std::to_string(y_) + " outside [0, " + std::to_string(model.num_classes) + ")");
  }
}

void BenchModel::init_queries() {
  queries_ = {};
  halted_ = false;
  best_ = {};
}

void BenchModel::check_dim(std::span<const double> candidate) const {
  if (candidate.size() != x_.size()) {
    throw DimensionError("query has dimension " + std::to_string(candidate.size()) + ", expected " +
                         std::to_string(x_.size()));
  }
}

void BenchModel::consume() {
  if (queries_.total() >= budget_) halted_ = true;
}

Vector BenchModel::counted_forward(std::span<const double> candidate) {
  check_dim(candidate);
  if (halted_) {
    Vector fake(model_->num_classes, 0.0);
    fake[static_cast<std::size_t>(y_)] = 1.0;
    return fake;
  }
  ++queries_.forwards;
  consume();
  Vector logits = forward(*model_, candidate).logits;
  if (static_cast<Label>(argmax(logits)) != y_) {
    const bool in_box = std::all_of(candidate.begin(), candidate.end(),
                                    [](double v) { return v >= 0.0 && v <= 1.0; });
    if (in_box) {
      const double d = distance(candidate, x_, p_);
      if (!best_.distance || d < *best_.distance) {
        best_.distance = d;
        best_.adversarial = Vector(candidate.begin(), candidate.end());
      }
    }
  }
  return logits;
}

Vector BenchModel::counted_backward(std::span<const double> candidate, std::span<const double> seed) {
  check_dim(candidate);
  if (seed.size() != model_->num_classes) {
    throw DimensionError("gradient seed has length " + std::to_string(seed.size()) + ", expected " +
                         std::to_string(model_->num_classes));
  }
  if (halted_) return Vector(x_.size(), 0.0);
  ++queries_.backwards;
  consume();
  return gradient(*model_, candidate, seed);
}

}  // namespace attackbench
