#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <mutex>
#include <thread>

#include "attackbench/benchmodel.hpp"
#include "attackbench/epsilon_search.hpp"
#include "attackbench/errors.hpp"
#include "attackbench/harness.hpp"
#include "rng.hpp"

namespace attackbench {

unsigned worker_threads(unsigned requested) {
  unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ATTACKBENCH_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

std::uint64_t hash_prefix(const std::string& hex) {
  return std::stoull(hex.substr(0, 16), nullptr, 16);
}

bool uses_search(const AttackConfig& attack) {
  return attack.mode == AttackMode::FixedBudget && attack.search.has_value();
}

SampleResult run_one(const AttackConfig& attack, const ModelParams& model, const Sample& s, std::uint64_t seed,
                     std::uint64_t budget) {
  SampleResult out;
  if (predict(model, s.x) != s.label) {
    out.distance = 0.0;
    return out;
  }
  AttackConfig cfg = attack;
  cfg.seed = seed;
  std::optional<BenchModel> bm;
  const auto start = std::chrono::steady_clock::now();
  try {
    bm.emplace(model, budget, cfg.p, s.x, s.label);
    if (uses_search(cfg)) {
      search(cfg, *bm, *cfg.search);
    } else {
      run_attack(cfg, *bm);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (bm) {
    const auto q = bm->num_queries();
    out.forwards = q.forwards;
    out.backwards = q.backwards;
    if (!out.error) out.distance = bm->take_best().distance;
  }
  return out;
}

}  // namespace

AttackRecord benchmark(const AttackConfig& attack, const ModelParams& model, std::string model_id,
                       const Dataset& data, const BenchmarkOptions& options) {
  attack.validate();
  model.validate();
  if (options.budget == 0) throw ConfigError("budget must be at least 1");
  if (data.dim != model.input_dim) {
    throw DimensionError("dataset has dimension " + std::to_string(data.dim) + ", model expects " +
                         std::to_string(model.input_dim));
  }
  for (const auto& s : data.samples) {
    if (s.x.size() != model.input_dim) throw DimensionError("sample dimension does not match the model");
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= model.num_classes) {
      throw DataError("sample label outside the model's classes");
    }
  }

  AttackRecord record;
  record.attack = attack.name;
  record.model = std::move(model_id);
  record.p = attack.p;
  record.budget = options.budget;
  if (uses_search(attack)) {
    SearchConfig s = *attack.search;
    s.eps_init = s.eps_init.value_or(default_search_epsilon(attack.p));
    record.search = s;
  }

  const std::size_t n = data.samples.size();
  std::vector<std::string> hashes(n);
  for (std::size_t i = 0; i < n; ++i) hashes[i] = hash_sample(data.samples[i].x);
  std::vector<SampleResult> results(n);

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const std::uint64_t seed = mix_seed(attack.seed, hash_prefix(hashes[i]));
      results[i] = run_one(attack, model, data.samples[i], seed, options.budget);
    }
  };
  const unsigned threads = std::min<std::size_t>(worker_threads(options.threads), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i) record.records.emplace(hashes[i], std::move(results[i]));
  record.timestamp = utc_timestamp();
  record.host = host_name();
  return record;
}

}  // namespace attackbench
