#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "attackbench/diffnet.hpp"
#include "attackbench/types.hpp"

namespace attackbench {

struct QueryCount {
  std::uint64_t forwards = 0;
  std::uint64_t backwards = 0;

  std::uint64_t total() const { return forwards + backwards; }
  friend bool operator==(const QueryCount&, const QueryCount&) = default;
};

struct BestAdversarial {
  std::optional<double> distance;  // empty = Failure
  std::optional<Vector> adversarial;

  bool success() const { return distance.has_value(); }
};

// Query-counting wrapper handed to attacks in place of the model. The budget
// counts forwards and backwards together. Once it is spent, forwards return a
// one-hot logit vector at the true label and backwards return zeros, so an
// attack keeps running but can no longer make progress. Every counted forward
// on a misclassified, in-box input competes for the best-so-far adversarial.
//
// Not thread-safe; use one instance per (sample, attack run).
class BenchModel {
 public:
  // Throws ConfigError when budget == 0, DimensionError when x does not
  // match the model.
  BenchModel(const ModelParams& model, std::uint64_t budget, Norm p, Vector x, Label y);

  // Resets counters, the halted flag and the best-so-far tracker.
  void init_queries();

  Vector counted_forward(std::span<const double> candidate);
  Vector counted_backward(std::span<const double> candidate, std::span<const double> seed);

  QueryCount num_queries() const { return queries_; }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t remaining() const { return budget_ - queries_.total(); }
  bool halted() const { return halted_; }

  BestAdversarial take_best() const { return best_; }

  const ModelParams& model() const { return *model_; }
  const Vector& original() const { return x_; }
  Label label() const { return y_; }
  Norm norm() const { return p_; }
  std::size_t dim() const { return x_.size(); }
  std::size_t num_classes() const { return model_->num_classes; }

 private:
  void consume();
  void check_dim(std::span<const double> candidate) const;

  const ModelParams* model_;
  std::uint64_t budget_;
  Norm p_;
  Vector x_;
  Label y_;
  QueryCount queries_;
  bool halted_ = false;
  BestAdversarial best_;
};

}  // namespace attackbench
