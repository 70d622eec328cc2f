#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "attackbench/attack.hpp"
#include "attackbench/errors.hpp"

namespace attackbench {
namespace {

// Largest logit other than y; lowest index on ties.
std::size_t best_other(std::span<const double> logits, std::size_t y) {
  std::size_t j = y == 0 ? 1 : 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (i != y && logits[i] > logits[j]) j = i;
  }
  return j;
}

}  // namespace

LossValue eval_loss(LossKind kind, double margin, std::span<const double> logits, Label label) {
  const std::size_t c = logits.size();
  if (c < 2) throw DimensionError("loss needs at least 2 logits");
  if (label < 0 || static_cast<std::size_t>(label) >= c) {
    throw DataError("label " + std::to_string(label) + " outside the logit range");
  }
  const auto y = static_cast<std::size_t>(label);
  LossValue out;
  out.seed.assign(c, 0.0);

  switch (kind) {
    case LossKind::Logit:
      out.value = logits[y];
      out.seed[y] = 1.0;
      break;

    case LossKind::Softmax:
    case LossKind::NCE: {
      const double top = *std::max_element(logits.begin(), logits.end());
      double total = 0.0;
      for (double f : logits) total += std::exp(f - top);
      const double log_total = std::log(total);
      const double log_zy = logits[y] - top - log_total;
      if (kind == LossKind::NCE) {
        out.value = log_zy;
        for (std::size_t i = 0; i < c; ++i) out.seed[i] = -std::exp(logits[i] - top - log_total);
        out.seed[y] += 1.0;
      } else {
        const double zy = std::exp(log_zy);
        out.value = zy;
        for (std::size_t i = 0; i < c; ++i) out.seed[i] = -zy * std::exp(logits[i] - top - log_total);
        out.seed[y] += zy;
      }
      break;
    }

    case LossKind::DL: {
      const std::size_t j = best_other(logits, y);
      const double diff = logits[y] - logits[j];
      if (diff >= -margin) {
        out.value = diff;
        out.seed[y] = 1.0;
        out.seed[j] = -1.0;
      } else {
        out.value = -margin;
      }
      break;
    }

    case LossKind::DLR: {
      if (c < 3) throw ConfigError("DLR loss needs at least 3 classes");
      std::vector<std::size_t> order(c);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return logits[a] > logits[b]; });
      const std::size_t j = best_other(logits, y);
      const double num = logits[y] - logits[j];
      const double den = logits[order[0]] - logits[order[2]] + 1e-12;
      out.value = num / den;
      out.seed[y] += 1.0 / den;
      out.seed[j] -= 1.0 / den;
      const double q = num / (den * den);
      out.seed[order[0]] -= q;
      out.seed[order[2]] += q;
      break;
    }
  }
  return out;
}

}  // namespace attackbench
