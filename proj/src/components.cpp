#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "attackbench/attack.hpp"
#include "attackbench/errors.hpp"
#include "attackbench/metrics.hpp"
#include "attackbench/simd/kernels.hpp"
#include "rng.hpp"

namespace attackbench {

// ---- initialisation -------------------------------------------------------

Vector initialize(const InitSpec& init, std::span<const double> x, Norm p, std::uint64_t seed) {
  const std::size_t d = x.size();
  switch (init.kind) {
    case InitKind::Zero:
      return Vector(d, 0.0);

    case InitKind::Adv: {
      if (!init.start) throw InitError("Adv initialisation needs a misclassified start point");
      if (init.start->size() != d) throw DimensionError("Adv start point has the wrong dimension");
      Vector delta(d);
      for (std::size_t i = 0; i < d; ++i) {
        const double s = (*init.start)[i];
        if (!(s >= 0.0 && s <= 1.0)) throw InitError("Adv start point lies outside [0,1]^d");
        delta[i] = s - x[i];
      }
      return delta;
    }

    case InitKind::Random: {
      Vector delta(d, 0.0);
      const double r = init.radius;
      if (!(r > 0.0) || d == 0) return delta;
      Rng rng(seed);
      switch (p) {
        case Norm::Linf:
          for (auto& v : delta) v = rng.uniform(-r, r);
          break;
        case Norm::L2: {
          double sq = 0.0;
          for (auto& v : delta) {
            v = rng.normal();
            sq += v * v;
          }
          const double len = std::sqrt(sq);
          const double scale = len > 0.0 ? r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / len : 0.0;
          for (auto& v : delta) v *= scale;
          break;
        }
        case Norm::L1: {
          // d+1 exponentials normalised by their sum give a uniform point of
          // the solid simplex; random signs spread it over the L1 ball.
          double total = 0.0;
          for (auto& v : delta) {
            v = rng.exponential();
            total += v;
          }
          total += rng.exponential();
          for (auto& v : delta) v = (rng.uniform() < 0.5 ? -r : r) * v / total;
          break;
        }
        case Norm::L0: {
          const auto k = std::min<std::size_t>(d, static_cast<std::size_t>(std::floor(r)));
          std::vector<std::size_t> idx(d);
          std::iota(idx.begin(), idx.end(), std::size_t{0});
          for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(d - i));
            std::swap(idx[i], idx[j]);
            delta[idx[i]] = rng.uniform(-x[idx[i]], 1.0 - x[idx[i]]);
          }
          break;
        }
      }
      clip_to_box(x, delta);
      return delta;
    }
  }
  return Vector(d, 0.0);
}

// ---- descent direction ----------------------------------------------------

Direction transform_direction(DirectionKind kind, std::span<const double> g, double alpha, Norm p) {
  Direction out;
  out.step.assign(g.size(), 0.0);
  if (kind == DirectionKind::Grad) {
    for (std::size_t i = 0; i < g.size(); ++i) out.step[i] = alpha * g[i];
    return out;
  }
  if (kind == DirectionKind::Proj && p == Norm::L0) {
    throw ConfigError("Proj direction is undefined for the L0 threat model");
  }

  const Norm scale_norm = (kind == DirectionKind::Norm && p == Norm::L0) ? Norm::L2 : p;
  const double len = norm_of(g, scale_norm);
  if (!(len > 0.0)) {
    out.stalled = true;
    return out;
  }

  if (kind == DirectionKind::Norm || p == Norm::L2) {
    const double s = alpha / len;
    for (std::size_t i = 0; i < g.size(); ++i) out.step[i] = s * g[i];
    return out;
  }
  if (p == Norm::Linf) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      out.step[i] = g[i] > 0.0 ? alpha : (g[i] < 0.0 ? -alpha : 0.0);
    }
    return out;
  }
  // L1: all mass on the largest-magnitude coordinate.
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (std::fabs(g[i]) > std::fabs(g[best])) best = i;
  }
  out.step[best] = g[best] > 0.0 ? alpha : -alpha;
  return out;
}

// ---- optimiser ------------------------------------------------------------

Vector optimizer_step(const OptimizerSpec& spec, std::span<const double> delta, std::span<const double> g_dir,
                      OptimizerState& state, double alpha) {
  const std::size_t d = delta.size();
  if (g_dir.size() != d) throw DimensionError("optimizer step: direction and perturbation differ in length");
  Vector next(delta.begin(), delta.end());
  switch (spec.kind) {
    case OptimizerKind::GD:
      for (std::size_t i = 0; i < d; ++i) next[i] -= g_dir[i];
      break;

    case OptimizerKind::GDMomentum:
      if (state.velocity.size() != d) state.velocity.assign(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        state.velocity[i] = spec.beta * state.velocity[i] + g_dir[i];
        next[i] -= state.velocity[i];
      }
      break;

    case OptimizerKind::Adam: {
      if (state.m.size() != d) state.m.assign(d, 0.0);
      if (state.v.size() != d) state.v.assign(d, 0.0);
      ++state.t;
      const double c1 = 1.0 - std::pow(spec.beta1, state.t);
      const double c2 = 1.0 - std::pow(spec.beta2, state.t);
      for (std::size_t i = 0; i < d; ++i) {
        state.m[i] = spec.beta1 * state.m[i] + (1.0 - spec.beta1) * g_dir[i];
        state.v[i] = spec.beta2 * state.v[i] + (1.0 - spec.beta2) * g_dir[i] * g_dir[i];
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        next[i] -= alpha * m_hat / (std::sqrt(v_hat) + spec.adam_eps);
      }
      break;
    }
  }
  return next;
}

// ---- projections ----------------------------------------------------------

namespace {

// Sort-based projection onto {w : ||w||_1 <= r}.
Vector project_l1(std::span<const double> v, double r) {
  Vector out(v.begin(), v.end());
  if (simd::sum_abs(v) <= r) return out;
  if (r <= 0.0) return Vector(v.size(), 0.0);
  Vector mags(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::fabs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumsum += mags[j];
    const double t = (cumsum - r) / static_cast<double>(j + 1);
    if (mags[j] - t > 0.0) theta = t;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::max(std::fabs(v[i]) - theta, 0.0);
    out[i] = std::copysign(m, v[i]);
  }
  return out;
}

}  // namespace

Vector project_ball(std::span<const double> delta, Norm p, double eps) {
  Vector out(delta.begin(), delta.end());
  switch (p) {
    case Norm::Linf:
      for (auto& v : out) v = std::clamp(v, -eps, eps);
      return out;
    case Norm::L2: {
      const double len = std::sqrt(simd::sum_sq(delta));
      if (len > eps) {
        const double s = eps / len;
        for (auto& v : out) v *= s;
      }
      return out;
    }
    case Norm::L1:
      return project_l1(delta, eps);
    case Norm::L0: {
      const double kf = std::floor(std::max(eps, 0.0));
      if (kf >= static_cast<double>(out.size())) return out;
      const auto k = static_cast<std::size_t>(kf);
      std::vector<std::size_t> idx(out.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t a, std::size_t b) { return std::fabs(out[a]) > std::fabs(out[b]); });
      for (std::size_t i = k; i < idx.size(); ++i) out[idx[i]] = 0.0;
      return out;
    }
  }
  return out;
}

void clip_to_box(std::span<const double> x, std::span<double> delta) {
  if (x.size() != delta.size()) throw DimensionError("box clip: x and delta differ in length");
  simd::active().box_clip(x.data(), delta.data(), x.size());
}

Vector project_feasible(std::span<const double> x, std::span<const double> delta, AttackMode mode, Norm p,
                        double eps) {
  if (x.size() != delta.size()) throw DimensionError("projection: x and delta differ in length");
  Vector out = mode == AttackMode::FixedBudget ? project_ball(delta, p, eps) : Vector(delta.begin(), delta.end());
  clip_to_box(x, out);
  return out;
}

// ---- step size schedules --------------------------------------------------

namespace {

double closed_form(const SchedulerSpec& spec, double alpha0, int k, int total) {
  switch (spec.kind) {
    case SchedulerKind::Lin:
    case SchedulerKind::Exp:
      return alpha0 * std::pow(spec.gamma, k);
    case SchedulerKind::Cos: {
      const double frac = total > 0 ? static_cast<double>(k) / total : 1.0;
      return spec.final_step + 0.5 * (alpha0 - spec.final_step) * (1.0 + std::cos(std::numbers::pi * frac));
    }
    case SchedulerKind::Fixed:
    case SchedulerKind::RoP:
      return alpha0;
  }
  return alpha0;
}

constexpr double kPlateauTolerance = 1e-9;

}  // namespace

StepScheduler::StepScheduler(const SchedulerSpec& spec, double alpha0, int total_steps)
    : spec_(spec),
      alpha0_(alpha0),
      total_(total_steps),
      alpha_(closed_form(spec, alpha0, 0, total_steps)),
      best_loss_(std::numeric_limits<double>::infinity()) {}

double StepScheduler::advance(double loss) {
  ++k_;
  if (spec_.kind != SchedulerKind::RoP) {
    alpha_ = closed_form(spec_, alpha0_, k_, total_);
    return alpha_;
  }
  if (loss < best_loss_ - kPlateauTolerance) {
    best_loss_ = loss;
    bad_steps_ = 0;
  } else if (++bad_steps_ >= spec_.patience) {
    alpha_ *= spec_.factor;
    bad_steps_ = 0;
  }
  return alpha_;
}

double schedule(const SchedulerSpec& spec, double alpha0, int k, int K, std::span<const double> loss_history) {
  if (k < 0 || k > K) throw ConfigError("schedule: step index outside [0, K]");
  if (spec.kind != SchedulerKind::RoP) return closed_form(spec, alpha0, k, K);
  StepScheduler replay(spec, alpha0, K);
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), loss_history.size());
  for (std::size_t i = 0; i < n; ++i) replay.advance(loss_history[i]);
  return replay.current();
}

}  // namespace attackbench
