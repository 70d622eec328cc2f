#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "attackbench/attack.hpp"
#include "attackbench/benchmodel.hpp"

namespace attackbench {

struct SearchTrial {
  double epsilon = 0.0;
  bool success = false;
};

struct SearchResult {
  std::optional<double> epsilon;      // smallest successful epsilon; empty = Failure
  std::optional<Vector> adversarial;  // from the trial that certified it
  std::vector<SearchTrial> trials;
};

// Runs trial(eps, index) for `steps` trials. Starting at eps_init, epsilon
// is halved after a success and doubled after a failure until a failing
// lower and a succeeding upper bound are both known; the remaining trials
// bisect that bracket. `trial` returns the adversarial example it found,
// if any. The search stops early once `halted` reports true.
SearchResult bracket_search(int steps, double eps_init,
                            const std::function<std::optional<Vector>(double eps, int index)>& trial,
                            const std::function<bool()>& halted = {});

// FixedBudget attack run as a minimum-norm procedure on a shared BenchModel.
// Each trial gets floor(K / S) steps (remainder to the final trial) and a
// trial-indexed seed, and starts cold. Throws ConfigError unless the attack
// is FixedBudget.
SearchResult search(const AttackConfig& attack, BenchModel& bm, const SearchConfig& cfg);

}  // namespace attackbench
