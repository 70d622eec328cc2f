#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attackbench/benchmodel.hpp"
#include "attackbench/types.hpp"

namespace attackbench {

enum class AttackMode { MinNorm, FixedBudget };
enum class LossKind { Logit, Softmax, NCE, DL, DLR };
enum class InitKind { Zero, Random, Adv };
enum class DirectionKind { Grad, Norm, Proj };
enum class OptimizerKind { GD, GDMomentum, Adam };
enum class SchedulerKind { Fixed, Lin, Cos, Exp, RoP };

// How a MinNorm attack steers the perturbation size. None is plain descent
// under the box constraint; the other three are the DDN, FMN and
// Carlini-Wagner penalty heuristics.
enum class NormStrategy { None, DDN, FMN, Penalty };

struct InitSpec {
  InitKind kind = InitKind::Zero;
  double radius = 0.0;          // Random only
  std::optional<Vector> start;  // Adv only: a misclassified point in the box
};

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::GD;
  double beta = 0.9;  // momentum
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::Fixed;
  double gamma = 0.99;      // Lin, Exp
  double final_step = 0.0;  // Cos: step size reached at k = K
  int patience = 10;        // RoP
  double factor = 0.5;      // RoP
};

struct StrategySpec {
  NormStrategy kind = NormStrategy::None;
  double gamma = 0.05;          // DDN: fixed; FMN: initial, cosine-annealed
  double gamma_final = 0.001;   // FMN
  double init_epsilon = 1.0;    // DDN
  std::vector<double> penalty_weights;  // Penalty: c trials, in order
};

// Bracketing-then-bisection search that runs a FixedBudget attack as a
// minimum-norm procedure. eps_init defaults per norm (default_search_epsilon()).
struct SearchConfig {
  int steps = 10;
  std::optional<double> eps_init;
};

// One attack: the five component slots plus threat model and
// hyperparameters.
//
// In FixedBudget mode every length-like hyperparameter (step_size, the
// Random init radius and the Cos final step) is a fraction of epsilon, so a
// config stays meaningful while the epsilon search rescales it.
struct AttackConfig {
  std::string name = "custom";
  AttackMode mode = AttackMode::FixedBudget;
  std::optional<double> epsilon;
  Norm p = Norm::Linf;
  LossKind loss = LossKind::NCE;
  InitSpec init;
  DirectionKind direction = DirectionKind::Proj;
  OptimizerSpec optimizer;
  SchedulerSpec scheduler;
  int steps = 1;
  double step_size = 1.0;
  double margin = 0.0;  // kappa, DL only
  std::uint64_t seed = 0;
  StrategySpec strategy;
  std::optional<SearchConfig> search;

  // Throws ConfigError on any violated invariant. Does not require epsilon
  // (the search supplies it).
  void validate() const;
};

// ---- components -----------------------------------------------------------

struct LossValue {
  double value = 0.0;
  Vector seed;  // dL/dlogits
};

// Large while correctly classified. DL is clamped from below at -margin.
// Throws ConfigError for DLR with fewer than 3 classes.
LossValue eval_loss(LossKind kind, double margin, std::span<const double> logits, Label y);

// Initial perturbation, deterministic in seed. Random draws uniformly from
// the p-ball of init.radius and clips x + delta into the box. Throws
// InitError for Adv without a start point.
Vector initialize(const InitSpec& init, std::span<const double> x, Norm p, std::uint64_t seed);

struct Direction {
  Vector step;
  bool stalled = false;  // g had zero norm under Norm/Proj
};

// Grad: alpha g. Norm: alpha g / ||g||_p (L0 normalises in L2). Proj: the
// maximiser of v.g over the alpha-ball (L1: one signed coordinate, L2: same
// as Norm, Linf: alpha sign(g)). Proj under L0 throws ConfigError.
Direction transform_direction(DirectionKind kind, std::span<const double> g, double alpha, Norm p);

struct OptimizerState {
  Vector velocity;
  Vector m;
  Vector v;
  int t = 0;
};

// delta_{k+1} before projection. Momentum uses v_0 = 0, v_{k+1} = beta v_k + g'.
// Adam consumes alpha directly since its update is scale-free in g'.
Vector optimizer_step(const OptimizerSpec& spec, std::span<const double> delta, std::span<const double> g_dir,
                      OptimizerState& state, double alpha);

// Euclidean projection onto the eps-ball of norm p (L0: keep the floor(eps)
// largest-magnitude coordinates, lowest index wins ties).
Vector project_ball(std::span<const double> delta, Norm p, double eps);

// Clips x + delta into [0,1]^d in place.
void clip_to_box(std::span<const double> x, std::span<double> delta);

// FixedBudget: ball projection then box clip (single pass). MinNorm: box
// clip only.
Vector project_feasible(std::span<const double> x, std::span<const double> delta, AttackMode mode, Norm p,
                        double eps);

// Step size at iteration k in [0, K]. RoP replays loss_history (one loss per
// completed step).
double schedule(const SchedulerSpec& spec, double alpha0, int k, int K, std::span<const double> loss_history);

// Incremental form of schedule() used inside the attack loop.
class StepScheduler {
 public:
  StepScheduler(const SchedulerSpec& spec, double alpha0, int total_steps);
  double current() const { return alpha_; }
  // Records the loss of the finished step and moves to the next one.
  double advance(double loss);

 private:
  SchedulerSpec spec_;
  double alpha0_;
  int total_;
  int k_ = 0;
  double alpha_;
  double best_loss_;
  int bad_steps_ = 0;
};

// ---- the unified loop -----------------------------------------------------

struct AttackOutcome {
  std::optional<Vector> adversarial;  // best misclassified point this run saw
  std::optional<double> distance;
  Vector last;                        // final iterate x + delta
  int steps_run = 0;
};

// Runs K iterations of forward, loss, backward, direction, optimiser step,
// projection and schedule through bm, then one forward on the final iterate.
// Stops early once bm halts. The authoritative result is bm.take_best().
AttackOutcome run_attack(const AttackConfig& config, BenchModel& bm);

// ---- presets --------------------------------------------------------------

// FGSM, BIM, PGD-L1, PGD-L2, PGD-Linf, DDN, FMN-L0, FMN-L1, FMN-L2,
// FMN-Linf, CW-L2. Throws ConfigError for other names.
AttackConfig preset(std::string_view name);
const std::vector<std::string>& preset_names();

double default_search_epsilon(Norm p);

std::string to_string(AttackMode v);
std::string to_string(LossKind v);
std::string to_string(InitKind v);
std::string to_string(DirectionKind v);
std::string to_string(OptimizerKind v);
std::string to_string(SchedulerKind v);
std::string to_string(NormStrategy v);

}  // namespace attackbench
