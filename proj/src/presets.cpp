#include <string>

#include "attackbench/attack.hpp"
#include "attackbench/errors.hpp"

namespace attackbench {
namespace {

// Iterative FixedBudget presets take 990 steps so the ten epsilon-search
// trials (99 steps + one final forward each) fit a 2,000-query budget.
constexpr int kSearchedSteps = 990;

AttackConfig fixed_budget(std::string name, Norm p, InitKind init, int steps, double step_size) {
  AttackConfig c;
  c.name = std::move(name);
  c.mode = AttackMode::FixedBudget;
  c.p = p;
  c.loss = LossKind::NCE;
  c.init.kind = init;
  c.init.radius = init == InitKind::Random ? 1.0 : 0.0;
  c.direction = DirectionKind::Proj;
  c.optimizer.kind = OptimizerKind::GD;
  c.scheduler.kind = SchedulerKind::Fixed;
  c.steps = steps;
  c.step_size = step_size;
  c.search = SearchConfig{};
  return c;
}

// FMN: logit-difference loss, normalised steps with cosine-annealed size,
// radius adapted with gamma annealed from 0.05 to 0.001, projected onto
// the current ball.
AttackConfig fmn(std::string name, Norm p, double step_size) {
  AttackConfig c;
  c.name = std::move(name);
  c.mode = AttackMode::MinNorm;
  c.p = p;
  c.loss = LossKind::DL;
  c.margin = 0.0;
  c.direction = DirectionKind::Norm;
  c.optimizer.kind = OptimizerKind::GD;
  c.scheduler.kind = SchedulerKind::Cos;
  c.scheduler.final_step = step_size / 100.0;
  c.steps = 1000;
  c.step_size = step_size;
  c.strategy.kind = NormStrategy::FMN;
  c.strategy.gamma = 0.05;
  c.strategy.gamma_final = 0.001;
  return c;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"FGSM",   "BIM",    "PGD-L1", "PGD-L2", "PGD-Linf", "DDN",
                                              "FMN-L0", "FMN-L1", "FMN-L2", "FMN-Linf", "CW-L2"};
  return names;
}

AttackConfig preset(std::string_view name) {
  if (name == "FGSM") return fixed_budget("FGSM", Norm::Linf, InitKind::Zero, 1, 1.0);
  if (name == "BIM") return fixed_budget("BIM", Norm::Linf, InitKind::Zero, kSearchedSteps, 0.05);
  if (name == "PGD-Linf") return fixed_budget("PGD-Linf", Norm::Linf, InitKind::Random, kSearchedSteps, 0.05);
  if (name == "PGD-L2") return fixed_budget("PGD-L2", Norm::L2, InitKind::Random, kSearchedSteps, 0.05);
  if (name == "PGD-L1") return fixed_budget("PGD-L1", Norm::L1, InitKind::Random, kSearchedSteps, 0.05);

  if (name == "DDN") {
    // Decoupled direction and norm: gamma = 0.05, initial radius 1, step
    // size cosine-annealed to 1% of its start.
    AttackConfig c;
    c.name = "DDN";
    c.mode = AttackMode::MinNorm;
    c.p = Norm::L2;
    c.loss = LossKind::NCE;
    c.direction = DirectionKind::Norm;
    c.optimizer.kind = OptimizerKind::GD;
    c.scheduler.kind = SchedulerKind::Cos;
    c.scheduler.final_step = 0.001;
    c.steps = 1000;
    c.step_size = 0.1;
    c.strategy.kind = NormStrategy::DDN;
    c.strategy.gamma = 0.05;
    c.strategy.init_epsilon = 1.0;
    return c;
  }

  if (name == "FMN-L0") return fmn("FMN-L0", Norm::L0, 0.2);
  if (name == "FMN-L1") return fmn("FMN-L1", Norm::L1, 0.1);
  if (name == "FMN-L2") return fmn("FMN-L2", Norm::L2, 0.1);
  if (name == "FMN-Linf") return fmn("FMN-Linf", Norm::Linf, 0.05);

  if (name == "CW-L2") {
    // Adam at lr 0.01 as in the original; 5 penalty weights share the
    // 995-step budget (199 steps + one final forward each).
    AttackConfig c;
    c.name = "CW-L2";
    c.mode = AttackMode::MinNorm;
    c.p = Norm::L2;
    c.loss = LossKind::DL;
    c.margin = 0.0;
    c.direction = DirectionKind::Grad;
    c.optimizer.kind = OptimizerKind::Adam;
    c.scheduler.kind = SchedulerKind::Fixed;
    c.steps = 995;
    c.step_size = 0.01;
    c.strategy.kind = NormStrategy::Penalty;
    c.strategy.penalty_weights = {0.01, 0.1, 1.0, 10.0, 100.0};
    return c;
  }

  throw ConfigError("unknown attack preset '" + std::string(name) + "'");
}

double default_search_epsilon(Norm p) {
  switch (p) {
    case Norm::L0: return 100.0;
    case Norm::L1: return 10.0;
    case Norm::L2: return 1.0;
    case Norm::Linf: return 1.0 / 255.0;
  }
  return 1.0;
}

}  // namespace attackbench
