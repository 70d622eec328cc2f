#include "attackbench/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "attackbench/errors.hpp"
#include "attackbench/simd/kernels.hpp"

namespace attackbench {

double norm_of(std::span<const double> v, Norm p) {
  switch (p) {
    case Norm::L0:
      return static_cast<double>(std::count_if(v.begin(), v.end(), [](double e) { return e != 0.0; }));
    case Norm::L1: return simd::sum_abs(v);
    case Norm::L2: return std::sqrt(simd::sum_sq(v));
    case Norm::Linf: return simd::max_abs(v);
  }
  return 0.0;
}

double distance(std::span<const double> a, std::span<const double> b, Norm p) {
  if (a.size() != b.size()) {
    throw DimensionError("distance between vectors of length " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  if (p == Norm::L0) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i] ? 1 : 0;
    return static_cast<double>(n);
  }
  Vector diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return norm_of(diff, p);
}

namespace {

void require_nonempty(const DistanceTable& table) {
  if (table.distances.empty()) throw DataError("distance table is empty");
}

}  // namespace

double asr(const DistanceTable& table, double eps) {
  require_nonempty(table);
  std::size_t hits = 0;
  for (const auto& [hash, d] : table.distances) {
    if (d && *d <= eps) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(table.size());
}

// Counted directly so that k/n prints exactly rather than as 1 - (n-k)/n.
double robust_accuracy(const DistanceTable& table, double eps) {
  require_nonempty(table);
  std::size_t robust = 0;
  for (const auto& [hash, d] : table.distances) {
    if (!d || *d > eps) ++robust;
  }
  return static_cast<double>(robust) / static_cast<double>(table.size());
}

double clean_accuracy(const DistanceTable& table) {
  require_nonempty(table);
  std::size_t robust = 0;
  for (const auto& [hash, d] : table.distances) {
    if (!d || *d > 0.0) ++robust;
  }
  return static_cast<double>(robust) / static_cast<double>(table.size());
}

double aurec(const DistanceTable& table, double eps0) {
  if (!(eps0 > 0.0)) throw ConfigError("AUREC needs a positive integration bound");
  require_nonempty(table);
  double total = 0.0;
  for (const auto& [hash, d] : table.distances) total += d ? std::min(*d, eps0) : eps0;
  return total / static_cast<double>(table.size());
}

DistanceTable ensemble_best(std::span<const DistanceTable> tables) {
  if (tables.empty()) throw DataError("ensemble needs at least one table");
  DistanceTable best = tables.front();
  for (std::size_t t = 1; t < tables.size(); ++t) {
    const auto& other = tables[t];
    if (other.p != best.p) throw DataError("ensemble tables use different norms");
    if (other.size() != best.size()) throw DataError("ensemble tables cover different samples");
    auto it = best.distances.begin();
    for (const auto& [hash, d] : other.distances) {
      if (it->first != hash) throw DataError("ensemble tables cover different samples (" + hash + ")");
      if (d && (!it->second || *d < *it->second)) it->second = d;
      ++it;
    }
  }
  return best;
}

double epsilon_zero(const DistanceTable& best) {
  require_nonempty(best);
  std::optional<double> top;
  for (const auto& [hash, d] : best.distances) {
    if (d && (!top || *d > *top)) top = d;
  }
  if (!top) throw ConfigError("every sample failed; epsilon_0 is undefined");
  return *top;
}

double local_optimality(double aurec_i, double aurec_star, double rho, double eps0) {
  constexpr double kTol = 1e-12;
  const double box = rho * eps0;
  const double denom = box - aurec_star;
  if (!(denom > 0.0)) throw DegenerateError("the best attack saturates the rho * eps0 box; LO is undefined");
  if (aurec_i < aurec_star - kTol || aurec_i > box + kTol) {
    throw DataError("AUREC " + std::to_string(aurec_i) + " outside [" + std::to_string(aurec_star) + ", " +
                    std::to_string(box) + "]");
  }
  return std::clamp((box - aurec_i) / denom, 0.0, 1.0);
}

double global_optimality(std::span<const double> los) {
  if (los.empty()) throw DataError("global optimality needs at least one model");
  double total = 0.0;
  for (double v : los) total += v;
  return total / static_cast<double>(los.size());
}

std::vector<RankEntry> rank(std::vector<RankEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.global_optimality != b.global_optimality) return a.global_optimality > b.global_optimality;
    if (a.mean_queries != b.mean_queries) return a.mean_queries < b.mean_queries;
    return a.attack < b.attack;
  });
  return entries;
}

std::vector<CurvePoint> robustness_curve(const DistanceTable& table, double eps0) {
  require_nonempty(table);
  std::vector<double> corners{0.0};
  for (const auto& [hash, d] : table.distances) {
    if (d && *d <= eps0) corners.push_back(*d);
  }
  corners.push_back(eps0);
  std::sort(corners.begin(), corners.end());
  corners.erase(std::unique(corners.begin(), corners.end()), corners.end());
  std::vector<CurvePoint> points;
  points.reserve(corners.size());
  for (double e : corners) points.push_back({e, robust_accuracy(table, e)});
  return points;
}

std::string curve_csv(std::span<const CurvePoint> points) {
  std::string out = "epsilon,robust_accuracy\n";
  char buf[64];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", pt.epsilon, pt.robust_accuracy);
    out += buf;
  }
  return out;
}

}  // namespace attackbench
