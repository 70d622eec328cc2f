// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "attackbench/benchmodel.hpp"
#include "attackbench/epsilon_search.hpp"
#include "attackbench/errors.hpp"
#include "attackbench/harness.hpp"
#include "attackbench/train.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace attackbench;
using testing::Gen;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---- 1: gradients ----------------------------------------------------------

Outcome gradient_oracle() {
  Outcome o;
  Gen g(101);
  const double h = 1e-4;
  std::size_t checked = 0;
  double worst = 0.0;
  for (int net = 0; net < 100; ++net) {
    const std::size_t d = 1 + g.below(10);
    const std::size_t classes = 2 + g.below(4);
    const auto m = testing::random_model(g, d, classes, 1 + g.below(3));
    const Vector x = g.vec(d, 0.0, 1.0);
    const Vector seed = g.vec(classes, -1.0, 1.0);
    const Vector grad = gradient(m, x, seed);
    for (std::size_t i = 0; i < d; ++i) {
      Vector up = x, down = x;
      up[i] += h;
      down[i] -= h;
      const double fd = (dot(seed, forward(m, up).logits) - dot(seed, forward(m, down).logits)) / (2 * h);
      if (std::fabs(grad[i]) <= 1e-6) continue;
      const double rel = std::fabs(grad[i] - fd) / std::fabs(grad[i]);
      worst = std::max(worst, rel);
      ++checked;
      if (rel >= 1e-3) fail(o, "net " + std::to_string(net) + " coordinate " + std::to_string(i));
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(checked) + " coordinates, worst relative error " +
              sci(worst);
  return o;
}

// ---- 2: projections --------------------------------------------------------

// Sort-based Euclidean projection onto the L1 ball: scan every support size
// and keep the threshold that is consistent with it.
Vector l1_oracle(const Vector& v, double r) {
  double total = 0.0;
  for (double a : v) total += std::fabs(a);
  if (total <= r) return v;
  Vector mags;
  for (double a : v) mags.push_back(std::fabs(a));
  std::sort(mags.rbegin(), mags.rend());
  double theta = 0.0, prefix = 0.0;
  for (std::size_t k = 1; k <= mags.size(); ++k) {
    prefix += mags[k - 1];
    const double t = (prefix - r) / static_cast<double>(k);
    const bool next_out = k == mags.size() || mags[k] <= t;
    if (mags[k - 1] > t && next_out) {
      theta = t;
      break;
    }
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::copysign(std::max(std::fabs(v[i]) - theta, 0.0), v[i]);
  return out;
}

Vector ball_oracle(const Vector& v, Norm p, double r) {
  Vector out = v;
  if (p == Norm::Linf) {
    for (double& a : out) a = std::clamp(a, -r, r);
  } else if (p == Norm::L2) {
    const double len = std::sqrt(dot(v, v));
    if (len > r) {
      for (double& a : out) a *= r / len;
    }
  } else {
    out = l1_oracle(v, r);
  }
  return out;
}

double sq_dist(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Minimum of ||g - v||^2 over grid points of [-0.5, 0.5]^d (d <= 2) with
// ||g||_p <= r.
std::pair<Vector, double> grid_oracle(const Vector& v, Norm p, double r) {
  const int n = 1000;
  const double step = 1.0 / n;
  Vector best;
  double best_val = std::numeric_limits<double>::infinity();
  const int second = v.size() == 2 ? n : 0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= second; ++j) {
      Vector gpt{-0.5 + i * step};
      if (v.size() == 2) gpt.push_back(-0.5 + j * step);
      if (norm_of(gpt, p) > r) continue;
      const double val = sq_dist(gpt, v);
      if (val < best_val) {
        best_val = val;
        best = gpt;
      }
    }
  }
  return {best, best_val};
}

Outcome projection_oracle() {
  Outcome o;
  Gen g(202);
  const Norm norms[] = {Norm::L1, Norm::L2, Norm::Linf};
  int grid_cases = 0;
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t d = 1 + g.below(5);
    const Norm p = norms[g.below(3)];
    // Centring x keeps the box inactive: every ball projection shrinks
    // coordinates, so |delta_i| <= 0.5 stays inside [0, 1] - x.
    const Vector x(d, 0.5);
    const Vector delta = g.vec(d, -0.5, 0.5);
    const double eps = g.uniform(0.01, 1.2);
    const Vector out = project_feasible(x, delta, AttackMode::FixedBudget, p, eps);
    const Vector expect = ball_oracle(delta, p, eps);
    const double gap = distance(out, expect, p);
    worst = std::max(worst, gap);
    if (gap > 1e-6) fail(o, "case " + std::to_string(c) + " differs from the sort-based oracle");
    if (norm_of(out, p) > eps * (1 + 1e-12)) fail(o, "case " + std::to_string(c) + " leaves the ball");
    if (distance(project_feasible(x, out, AttackMode::FixedBudget, p, eps), out, p) > 1e-12) {
      fail(o, "case " + std::to_string(c) + " is not idempotent");
    }
    if (d <= 2) {
      ++grid_cases;
      const auto [gpt, gval] = grid_oracle(delta, p, eps);
      const double val = sq_dist(out, delta);
      // Optimal within 1e-6 of every feasible grid point, and the grid
      // minimiser sits where strong convexity says it must.
      if (std::sqrt(val) > std::sqrt(gval) + 1e-6) fail(o, "case " + std::to_string(c) + " beaten by the grid");
      if (sq_dist(gpt, out) > gval - val + 1e-6) fail(o, "case " + std::to_string(c) + " far from the grid minimiser");
      if (std::sqrt(gval) - std::sqrt(val) > 3e-3) fail(o, "case " + std::to_string(c) + " grid gap too large");
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(grid_cases) + " grid cases, worst oracle gap " +
              sci(worst);
  return o;
}

// ---- 3: AUREC --------------------------------------------------------------

Outcome aurec_equivalence() {
  Outcome o;
  Gen g(303);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    DistanceTable table;
    table.p = Norm::L2;
    const std::size_t n = 1 + g.below(50);
    std::vector<double> finite;
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<double> dist;
      const double u = g.uniform();
      if (u < 0.1) {
        dist = 0.0;
      } else if (u < 0.9) {
        dist = g.uniform(0.0, 3.0);
      }
      table.distances["h" + std::to_string(i)] = dist;
      if (dist) finite.push_back(*dist);
    }
    const double eps0 = g.uniform(0.05, 3.5);
    // Integrate the robust-accuracy step function segment by segment.
    std::vector<double> cuts{0.0, eps0};
    for (double v : finite) {
      if (v > 0.0 && v < eps0) cuts.push_back(v);
    }
    std::sort(cuts.begin(), cuts.end());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
      area += (cuts[k + 1] - cuts[k]) * robust_accuracy(table, mid);
    }
    const double closed = aurec(table, eps0);
    worst = std::max(worst, std::fabs(closed - area));
    if (std::fabs(closed - area) > 1e-9) fail(o, "table " + std::to_string(t));
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("worst gap ") + sci(worst);
  return o;
}

// ---- 4: optimality algebra ---------------------------------------------------

AttackRecord make_record(const std::string& attack, const std::vector<std::optional<double>>& d,
                         const std::string& model = "m") {
  AttackRecord r;
  r.attack = attack;
  r.model = model;
  r.p = Norm::L2;
  r.budget = 2000;
  for (std::size_t i = 0; i < d.size(); ++i) {
    SampleResult s;
    s.distance = d[i];
    s.forwards = 7;
    s.backwards = 3;
    r.records["h" + std::to_string(i)] = s;
  }
  return r;
}

Outcome optimality_algebra() {
  Outcome o;
  const auto mo = compute_local_optimality(std::vector<AttackRecord>{
      make_record("best", {0.0, 0.3, 0.6, 1.1}), make_record("other", {0.0, 0.5, 0.6, 1.4}),
      make_record("none", {0.0, std::nullopt, std::nullopt, std::nullopt})});
  if (mo.local_optimality.at("best") != 1.0) fail(o, "LO(a*) != 1");
  if (mo.local_optimality.at("none") != 0.0) fail(o, "all-Failure LO != 0");
  const double lo = local_optimality(1.0, 0.5, 0.95, 2.5);
  if (std::fabs(lo - 11.0 / 15.0) > 1e-12) fail(o, "fixture LO = " + std::to_string(lo));
  const std::vector<double> los{0.8, 1.0};
  if (global_optimality(los) != 0.9) fail(o, "GO{0.8, 1.0} != 0.9");
  if (o.pass) o.detail = "fixture LO " + std::to_string(lo);
  return o;
}

// ---- 5: budget safety ------------------------------------------------------

Outcome budget_safety() {
  Outcome o;
  Gen g(505);
  std::uint64_t calls = 0;
  for (int s = 0; s < 10000 && o.pass; ++s) {
    const std::size_t d = 1 + g.below(4);
    const std::size_t classes = 2 + g.below(3);
    const auto m = testing::random_model(g, d, classes, 1 + g.below(2));
    const Vector x = g.vec(d, 0.0, 1.0);
    const Label y = static_cast<Label>(g.below(classes));
    const std::uint64_t budget = 1 + g.below(50);
    BenchModel bm(m, budget, Norm::L2, x, y);
    const std::size_t length = g.below(80);
    for (std::size_t c = 0; c < length; ++c, ++calls) {
      const bool was_halted = bm.halted();
      const auto before_q = bm.num_queries();
      const auto before_best = bm.take_best();
      const Vector cand = g.vec(d, -0.2, 1.2);
      if (g.below(2) == 0) {
        const Vector out = bm.counted_forward(cand);
        if (was_halted) {
          for (std::size_t k = 0; k < classes; ++k) {
            if (out[k] != (static_cast<Label>(k) == y ? 1.0 : 0.0)) fail(o, "post-halt forward is not one-hot");
          }
        }
      } else {
        const Vector out = bm.counted_backward(cand, g.vec(classes, -1.0, 1.0));
        if (was_halted && std::any_of(out.begin(), out.end(), [](double v) { return v != 0.0; })) {
          fail(o, "post-halt backward is not zero");
        }
      }
      if (bm.num_queries().total() > budget) fail(o, "sequence " + std::to_string(s) + " exceeded its budget");
      if (was_halted) {
        const auto after = bm.take_best();
        if (!(bm.num_queries() == before_q) || after.distance != before_best.distance ||
            after.adversarial != before_best.adversarial) {
          fail(o, "sequence " + std::to_string(s) + " changed state after halting");
        }
      }
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(calls) + " calls";
  return o;
}

// ---- 6: epsilon search -------------------------------------------------------

Outcome search_bracket() {
  Outcome o;
  const auto result = bracket_search(10, 1.0, [](double eps, int) -> std::optional<Vector> {
    if (eps >= 0.3) return Vector{eps};
    return std::nullopt;
  });
  if (!result.epsilon) {
    fail(o, "no epsilon returned");
    return o;
  }
  const double e = *result.epsilon;
  if (!(e >= 0.3 && e < 0.302)) fail(o, "epsilon outside the bracket");
  std::ostringstream ss;
  ss.precision(17);
  ss << "eps* = " << e << " after " << result.trials.size() << " trials";
  o.detail += (o.detail.empty() ? "" : "; ") + ss.str();
  return o;
}

// ---- 7: desk-scale ordering ----------------------------------------------------

Outcome desk_ordering() {
  Outcome o;
  const Dataset data = generate_synthetic(SyntheticKind::Blobs, 500, 32, 1);
  TrainParams tp;
  tp.epochs = 100;
  const ModelParams model = train(data, Architecture{{32}}, tp, std::nullopt, 1);

  std::vector<AttackRecord> records;
  for (const auto& name : preset_names()) records.push_back(benchmark(preset(name), model, "blobs", data));
  AttackConfig fgm = preset("FGSM");
  fgm.name = "FGM";
  fgm.p = Norm::L2;
  records.push_back(benchmark(fgm, model, "blobs", data));

  for (const auto& r : records) {
    std::size_t failed = 0;
    for (const auto& [h, s] : r.records) failed += !s.distance.has_value();
    if (failed > 0) fail(o, r.attack + " failed on " + std::to_string(failed) + " samples");
  }
  const auto board = build_leaderboard(records);
  std::map<std::string, double> go;
  for (const auto& group : board.groups) {
    for (const auto& row : group.rows) go[row.attack] = row.global_optimality;
  }
  const double pgd = go.at("PGD-Linf"), fgsm = go.at("FGSM"), ddn = go.at("DDN"), fgm_go = go.at("FGM");
  if (!(pgd >= fgsm + 0.05)) fail(o, "GO(PGD-Linf) does not beat GO(FGSM) by 0.05");
  if (!(ddn >= fgm_go + 0.05)) fail(o, "GO(DDN) does not beat GO(FGM) by 0.05");
  char buf[160];
  std::snprintf(buf, sizeof buf, "GO PGD-Linf %.3f vs FGSM %.3f, DDN %.3f vs FGM %.3f, train accuracy %.3f", pgd,
                fgsm, ddn, fgm_go, accuracy(model, data));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string(buf);
  return o;
}

// ---- 8: merge monotonicity ---------------------------------------------------

std::vector<double> all_go(const Leaderboard& board) {
  std::vector<double> out;
  for (const auto& group : board.groups) {
    for (const auto& row : group.rows) {
      out.push_back(row.global_optimality);
      for (const auto& [m, lo] : row.local_optimality) out.push_back(lo);
    }
  }
  return out;
}

Outcome merge_monotonicity() {
  Outcome o;
  Gen g(808);
  int checked = 0;
  for (int trial = 0; trial < 40 && o.pass; ++trial) {
    const auto store = testing::temp_dir("accept_store");
    const std::size_t n = 5 + g.below(20);
    std::vector<bool> misclassified(n);
    for (std::size_t i = 0; i < n; ++i) misclassified[i] = g.uniform() < 0.1;
    const auto random_record = [&](const std::string& name, double fail_rate) {
      std::vector<std::optional<double>> d(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (misclassified[i]) {
          d[i] = 0.0;
        } else if (g.uniform() >= fail_rate) {
          d[i] = g.uniform(0.01, 2.0);
        }
      }
      if (!misclassified[0]) d[0] = g.uniform(0.01, 2.0);
      return make_record(name, d);
    };
    std::vector<AttackRecord> merged;
    // The store starts with one complete record; later ones may fail on
    // some samples.
    merged.push_back(random_record("a0", 0.0));
    Leaderboard board = merge_leaderboard(store, merged.back());
    for (int k = 1; k < 6; ++k) {
      merged.push_back(random_record("a" + std::to_string(k), g.uniform(0.0, 0.5)));
      const double before = board.models.at(0).aurec_star;
      board = merge_leaderboard(store, merged.back());
      ++checked;
      if (board.models.at(0).aurec_star > before) fail(o, "aurec_star increased in trial " + std::to_string(trial));
    }
    const auto reference = all_go(board);
    for (const auto& r : merged) {
      const auto again = all_go(merge_leaderboard(store, r));
      if (again.size() != reference.size() ||
          std::memcmp(again.data(), reference.data(), again.size() * sizeof(double)) != 0) {
        fail(o, "duplicate merge changed GO in trial " + std::to_string(trial));
      }
    }
    std::filesystem::remove_all(store);
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(checked) + " merges";
  return o;
}

// ---- 9: determinism ------------------------------------------------------------

std::string strip_volatile(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  j.erase("meta");
  for (auto& [h, e] : j["records"].items()) e.erase("time_s");
  return j.dump(2);
}

Outcome determinism() {
  Outcome o;
  const auto once = [] {
    const Dataset data = generate_synthetic(SyntheticKind::Moons, 60, 4, 9);
    TrainParams tp;
    tp.epochs = 40;
    AttackConfig adv = preset("PGD-Linf");
    adv.search.reset();
    adv.epsilon = 0.05;
    adv.steps = 5;
    const ModelParams model = train(data, Architecture{{16}}, tp, adv, 9);
    std::vector<std::string> out;
    for (const auto& name : preset_names()) out.push_back(strip_volatile(record_to_json(benchmark(preset(name), model,
                                                                                                  "moons", data))));
    return out;
  };
  const auto a = once();
  const auto b = once();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) fail(o, preset_names()[i] + " differs between runs");
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(a.size()) + " records compared";
  return o;
}

}  // namespace

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
  double time_limit_s;
};

int main() {
  const double none = std::numeric_limits<double>::infinity();
  const std::vector<Criterion> criteria{
      {"gradient oracle", gradient_oracle, 5.0},
      {"projection oracle", projection_oracle, 30.0},
      {"AUREC equivalence", aurec_equivalence, 5.0},
      {"optimality algebra", optimality_algebra, none},
      {"budget safety", budget_safety, none},
      {"epsilon-search bracket", search_bracket, none},
      {"desk-scale ordering", desk_ordering, 180.0},
      {"leaderboard merge monotonicity", merge_monotonicity, none},
      {"determinism", determinism, none},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > criteria[i].time_limit_s) fail(o, "over the time limit");
    std::printf("[%s] %zu. %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
