#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "attackbench/attack.hpp"
#include "attackbench/errors.hpp"
#include "attackbench/metrics.hpp"
#include "rng.hpp"

namespace attackbench {

std::string to_string(AttackMode v) { return v == AttackMode::MinNorm ? "MinNorm" : "FixedBudget"; }

std::string to_string(LossKind v) {
  switch (v) {
    case LossKind::Logit: return "Logit";
    case LossKind::Softmax: return "Softmax";
    case LossKind::NCE: return "NCE";
    case LossKind::DL: return "DL";
    case LossKind::DLR: return "DLR";
  }
  return "NCE";
}

std::string to_string(InitKind v) {
  switch (v) {
    case InitKind::Zero: return "Zero";
    case InitKind::Random: return "Random";
    case InitKind::Adv: return "Adv";
  }
  return "Zero";
}

std::string to_string(DirectionKind v) {
  switch (v) {
    case DirectionKind::Grad: return "Grad";
    case DirectionKind::Norm: return "Norm";
    case DirectionKind::Proj: return "Proj";
  }
  return "Grad";
}

std::string to_string(OptimizerKind v) {
  switch (v) {
    case OptimizerKind::GD: return "GD";
    case OptimizerKind::GDMomentum: return "GDMomentum";
    case OptimizerKind::Adam: return "Adam";
  }
  return "GD";
}

std::string to_string(SchedulerKind v) {
  switch (v) {
    case SchedulerKind::Fixed: return "Fixed";
    case SchedulerKind::Lin: return "Lin";
    case SchedulerKind::Cos: return "Cos";
    case SchedulerKind::Exp: return "Exp";
    case SchedulerKind::RoP: return "RoP";
  }
  return "Fixed";
}

std::string to_string(NormStrategy v) {
  switch (v) {
    case NormStrategy::None: return "None";
    case NormStrategy::DDN: return "DDN";
    case NormStrategy::FMN: return "FMN";
    case NormStrategy::Penalty: return "Penalty";
  }
  return "None";
}

void AttackConfig::validate() const {
  const auto fail = [this](const std::string& what) { throw ConfigError("attack '" + name + "': " + what); };
  if (steps < 1) fail("steps must be at least 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) fail("step_size must be positive");
  if (!(margin >= 0.0)) fail("margin must be non-negative");
  if (epsilon && !(*epsilon > 0.0)) fail("epsilon must be positive");
  if (direction == DirectionKind::Proj && p == Norm::L0) fail("Proj direction is undefined for L0");
  if (init.kind == InitKind::Random && !(init.radius >= 0.0)) fail("Random init radius must be non-negative");
  if (optimizer.kind == OptimizerKind::GDMomentum && !(optimizer.beta >= 0.0 && optimizer.beta < 1.0)) {
    fail("momentum beta must lie in [0, 1)");
  }
  if (optimizer.kind == OptimizerKind::Adam &&
      !(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0 && optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0 &&
        optimizer.adam_eps > 0.0)) {
    fail("Adam needs beta1, beta2 in [0, 1) and a positive epsilon");
  }
  if ((scheduler.kind == SchedulerKind::Lin || scheduler.kind == SchedulerKind::Exp) &&
      !(scheduler.gamma > 0.0 && scheduler.gamma < 1.0)) {
    fail("scheduler gamma must lie in (0, 1)");
  }
  if (scheduler.kind == SchedulerKind::Cos && !(scheduler.final_step >= 0.0)) fail("Cos final step must be >= 0");
  if (scheduler.kind == SchedulerKind::RoP &&
      !(scheduler.patience >= 1 && scheduler.factor > 0.0 && scheduler.factor < 1.0)) {
    fail("RoP needs patience >= 1 and factor in (0, 1)");
  }
  if (strategy.kind != NormStrategy::None && mode != AttackMode::MinNorm) {
    fail("norm strategies apply to MinNorm attacks only");
  }
  if (strategy.kind == NormStrategy::DDN && p != Norm::L2) fail("DDN is an L2 attack");
  if ((strategy.kind == NormStrategy::DDN || strategy.kind == NormStrategy::FMN) &&
      !(strategy.gamma > 0.0 && strategy.gamma < 1.0)) {
    fail("strategy gamma must lie in (0, 1)");
  }
  if (strategy.kind == NormStrategy::DDN && !(strategy.init_epsilon > 0.0)) fail("DDN init_epsilon must be positive");
  if (strategy.kind == NormStrategy::Penalty) {
    if (p != Norm::L2) fail("the penalty strategy uses the squared L2 norm");
    if (strategy.penalty_weights.empty()) fail("penalty strategy needs at least one weight");
    for (double c : strategy.penalty_weights) {
      if (!(c > 0.0)) fail("penalty weights must be positive");
    }
  }
  if (search && search->steps < 2) fail("search needs at least 2 steps");
  if (search && search->eps_init && !(*search->eps_init > 0.0)) fail("search eps_init must be positive");
}

namespace {

// Dual exponent used by FMN's linear boundary estimate.
Norm dual(Norm p) {
  switch (p) {
    case Norm::Linf: return Norm::L1;
    case Norm::L1:
    case Norm::L0: return Norm::Linf;
    case Norm::L2: return Norm::L2;
  }
  return Norm::L2;
}

class Runner {
 public:
  Runner(const AttackConfig& cfg, BenchModel& bm) : cfg_(cfg), bm_(bm), x_(bm.original()), y_(bm.label()) {}

  AttackOutcome run() {
    if (cfg_.mode == AttackMode::FixedBudget && !cfg_.epsilon) {
      throw ConfigError("attack '" + cfg_.name + "': FixedBudget run needs epsilon");
    }
    if (cfg_.strategy.kind == NormStrategy::Penalty) {
      run_penalty();
    } else {
      run_descent();
    }
    return std::move(outcome_);
  }

 private:
  double scale() const { return cfg_.mode == AttackMode::FixedBudget ? *cfg_.epsilon : 1.0; }

  Vector point(const Vector& delta) const {
    Vector xk(x_.size());
    for (std::size_t i = 0; i < xk.size(); ++i) xk[i] = x_[i] + delta[i];
    return xk;
  }

  // Counted forward plus own best tracking. Returns the logits.
  Vector query(const Vector& xk, bool& adversarial) {
    Vector logits = bm_.counted_forward(xk);
    adversarial = static_cast<Label>(argmax(logits)) != y_;
    if (adversarial) {
      const double d = distance(xk, x_, cfg_.p);
      if (!outcome_.distance || d < *outcome_.distance) {
        outcome_.distance = d;
        outcome_.adversarial = xk;
      }
    }
    return logits;
  }

  Vector start(std::uint64_t seed) const {
    InitSpec init = cfg_.init;
    init.radius *= scale();
    Vector delta = initialize(init, x_, cfg_.p, seed);
    if (cfg_.mode == AttackMode::FixedBudget) return project_feasible(x_, delta, cfg_.mode, cfg_.p, *cfg_.epsilon);
    clip_to_box(x_, delta);
    return delta;
  }

  void finish(const Vector& delta) {
    outcome_.last = point(delta);
    if (!bm_.halted()) {
      bool adv = false;
      query(outcome_.last, adv);
    }
  }

  void run_descent() {
    const int total = cfg_.steps;
    const double eps_scale = scale();
    SchedulerSpec sched_spec = cfg_.scheduler;
    sched_spec.final_step *= eps_scale;
    StepScheduler scheduler(sched_spec, cfg_.step_size * eps_scale, total);
    OptimizerState opt_state;

    Vector delta = start(cfg_.seed);

    const auto& strat = cfg_.strategy;
    double radius = strat.kind == NormStrategy::DDN ? strat.init_epsilon : std::numeric_limits<double>::infinity();
    bool found = false;

    for (int k = 0; k < total; ++k) {
      if (bm_.halted()) break;
      const Vector xk = point(delta);
      bool adversarial = false;
      const Vector logits = query(xk, adversarial);
      if (k == 0 && cfg_.init.kind == InitKind::Adv && !adversarial && !bm_.halted()) {
        throw InitError("attack '" + cfg_.name + "': Adv start point is classified correctly");
      }
      const LossValue loss = eval_loss(cfg_.loss, cfg_.margin, logits, y_);
      const Vector g = bm_.counted_backward(xk, loss.seed);

      if (strat.kind == NormStrategy::DDN) {
        radius *= adversarial ? (1.0 - strat.gamma) : (1.0 + strat.gamma);
      } else if (strat.kind == NormStrategy::FMN) {
        const double gamma =
            strat.gamma_final + 0.5 * (strat.gamma - strat.gamma_final) *
                                    (1.0 + std::cos(std::numbers::pi * static_cast<double>(k) / total));
        const double current = norm_of(delta, cfg_.p);
        const double gdual = norm_of(g, dual(cfg_.p));
        const double to_boundary = gdual > 0.0 ? std::max(loss.value, 0.0) / gdual : 0.0;
        if (cfg_.p == Norm::L0) {
          // Integer radius: move by at least one coordinate per step.
          if (adversarial) {
            found = true;
            radius = std::min({radius - 1.0, std::floor(radius * (1.0 - gamma)), current});
          } else if (found) {
            radius = std::max(radius + 1.0, std::floor(radius * (1.0 + gamma)));
          } else {
            radius = current + std::max(1.0, to_boundary);
          }
          radius = std::max(radius, 1.0);
        } else if (adversarial) {
          found = true;
          radius = std::min(radius * (1.0 - gamma), current);
        } else if (found) {
          radius *= 1.0 + gamma;
        } else {
          // Overshoot the linear boundary estimate slightly: landing exactly
          // on a tie is not adversarial and is a fixed point of the update.
          radius = (current + to_boundary) * (1.0 + gamma);
        }
      }

      const Direction dir = transform_direction(cfg_.direction, g, scheduler.current(), cfg_.p);
      delta = optimizer_step(cfg_.optimizer, delta, dir.step, opt_state, scheduler.current());

      if (cfg_.mode == AttackMode::FixedBudget) {
        delta = project_ball(delta, cfg_.p, *cfg_.epsilon);
      } else if (strat.kind == NormStrategy::DDN) {
        // DDN keeps the perturbation on the sphere of the current radius.
        const double len = norm_of(delta, Norm::L2);
        if (len > 0.0) {
          for (auto& v : delta) v *= radius / len;
        }
      } else if (strat.kind == NormStrategy::FMN && std::isfinite(radius)) {
        delta = project_ball(delta, cfg_.p, radius);
      }
      clip_to_box(x_, delta);

      scheduler.advance(loss.value);
      outcome_.steps_run = k + 1;
    }
    finish(delta);
  }

  // Carlini-Wagner style: minimise ||delta||_2^2 + c * max(DL, -kappa) for
  // each c in turn, splitting the step budget evenly (remainder to the last).
  void run_penalty() {
    const auto& weights = cfg_.strategy.penalty_weights;
    const int trials = static_cast<int>(weights.size());
    const int per = std::max(1, cfg_.steps / trials);
    const int last = std::max(1, cfg_.steps - per * (trials - 1));
    Vector delta;
    for (int t = 0; t < trials; ++t) {
      if (bm_.halted()) break;
      const double c = weights[static_cast<std::size_t>(t)];
      const int steps = t + 1 == trials ? last : per;
      StepScheduler scheduler(cfg_.scheduler, cfg_.step_size, steps);
      OptimizerState opt_state;
      delta = start(mix_seed(cfg_.seed, static_cast<std::uint64_t>(t)));
      for (int k = 0; k < steps; ++k) {
        if (bm_.halted()) break;
        const Vector xk = point(delta);
        bool adversarial = false;
        const Vector logits = query(xk, adversarial);
        LossValue loss = eval_loss(cfg_.loss, cfg_.margin, logits, y_);
        for (auto& s : loss.seed) s *= c;
        Vector g = bm_.counted_backward(xk, loss.seed);
        double objective = c * loss.value;
        for (std::size_t i = 0; i < g.size(); ++i) {
          g[i] += 2.0 * delta[i];
          objective += delta[i] * delta[i];
        }
        const Direction dir = transform_direction(cfg_.direction, g, scheduler.current(), cfg_.p);
        delta = optimizer_step(cfg_.optimizer, delta, dir.step, opt_state, scheduler.current());
        clip_to_box(x_, delta);
        scheduler.advance(objective);
        ++outcome_.steps_run;
      }
      if (!bm_.halted()) {
        bool adv = false;
        query(point(delta), adv);
      }
    }
    outcome_.last = point(delta.empty() ? Vector(x_.size(), 0.0) : delta);
  }

  const AttackConfig& cfg_;
  BenchModel& bm_;
  const Vector& x_;
  Label y_;
  AttackOutcome outcome_;
};

}  // namespace

AttackOutcome run_attack(const AttackConfig& config, BenchModel& bm) {
  config.validate();
  if (config.p != bm.norm()) {
    throw ConfigError("attack '" + config.name + "' uses " + to_string(config.p) + " but the benchmark measures " +
                      to_string(bm.norm()));
  }
  return Runner(config, bm).run();
}

}  // namespace attackbench
