#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace attackbench {

// Dense real vector. Inputs, perturbations, logits and gradients all use it.
using Vector = std::vector<double>;

using Label = int;

// Threat-model norm.
enum class Norm { L0, L1, L2, Linf };

std::string to_string(Norm p);
// Accepts "l0", "l1", "l2", "linf" (also "0", "1", "2", "inf"); throws
// ConfigError otherwise.
Norm parse_norm(std::string_view text);

struct Sample {
  Vector x;
  Label label = 0;
};

}  // namespace attackbench
