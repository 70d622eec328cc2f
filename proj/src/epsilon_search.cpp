#include "attackbench/epsilon_search.hpp"

#include <algorithm>

#include "attackbench/errors.hpp"
#include "rng.hpp"

namespace attackbench {

SearchResult bracket_search(int steps, double eps_init,
                            const std::function<std::optional<Vector>(double, int)>& trial,
                            const std::function<bool()>& halted) {
  if (steps < 1) throw ConfigError("search needs at least one step");
  if (!(eps_init > 0.0)) throw ConfigError("search eps_init must be positive");

  SearchResult result;
  std::optional<double> lower;  // largest known failure below the best success
  std::optional<double> upper;  // smallest known success
  double eps = eps_init;

  for (int i = 0; i < steps; ++i) {
    if (halted && halted()) break;
    std::optional<Vector> adv = trial(eps, i);
    const bool ok = adv.has_value();
    result.trials.push_back({eps, ok});
    if (ok) {
      if (!upper || eps < *upper) {
        upper = eps;
        result.epsilon = eps;
        result.adversarial = std::move(adv);
      }
    } else if (!upper || eps < *upper) {
      lower = std::max(lower.value_or(eps), eps);
    }

    if (upper && lower) {
      eps = 0.5 * (*lower + *upper);
    } else if (upper) {
      eps = *upper / 2.0;
    } else {
      eps *= 2.0;
    }
  }
  return result;
}

SearchResult search(const AttackConfig& attack, BenchModel& bm, const SearchConfig& cfg) {
  attack.validate();
  if (attack.mode != AttackMode::FixedBudget) throw ConfigError("epsilon search needs a FixedBudget attack");
  if (cfg.steps < 2) throw ConfigError("epsilon search needs at least 2 steps");
  const double eps_init = cfg.eps_init.value_or(default_search_epsilon(attack.p));
  const int per_trial = std::max(1, attack.steps / cfg.steps);
  const int final_trial = std::max(1, attack.steps - per_trial * (cfg.steps - 1));

  const auto trial = [&](double eps, int index) -> std::optional<Vector> {
    AttackConfig run = attack;
    run.epsilon = eps;
    run.steps = index + 1 == cfg.steps ? final_trial : per_trial;
    run.seed = mix_seed(attack.seed, static_cast<std::uint64_t>(index));
    return run_attack(run, bm).adversarial;
  };
  return bracket_search(cfg.steps, eps_init, trial, [&] { return bm.halted(); });
}

}  // namespace attackbench
