#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attackbench/types.hpp"

namespace attackbench {

// ||a - b||_p. L0 counts coordinates that differ exactly. Throws
// DimensionError on length mismatch.
double distance(std::span<const double> a, std::span<const double> b, Norm p);

// ||v||_p
double norm_of(std::span<const double> v, Norm p);

// Per-sample best distances of one attack against one model, keyed by sample
// hash. An empty optional is a Failure (treated as +inf).
struct DistanceTable {
  Norm p = Norm::L2;
  std::map<std::string, std::optional<double>> distances;

  std::size_t size() const { return distances.size(); }
};

// Fraction of samples with d <= eps. Throws DataError on an empty table.
double asr(const DistanceTable& table, double eps);
// 1 - asr(eps)
double robust_accuracy(const DistanceTable& table, double eps);
// Clean accuracy: fraction of samples with d > 0 (Failures included).
double clean_accuracy(const DistanceTable& table);

// Area under the robust-accuracy curve on [0, eps0]: mean of min(d, eps0),
// with Failures contributing eps0. Throws ConfigError when eps0 <= 0.
double aurec(const DistanceTable& table, double eps0);

// Sample-wise minimum. Failure only where every table fails. Throws
// DataError when hash sets or norms differ.
DistanceTable ensemble_best(std::span<const DistanceTable> tables);

// Largest finite distance of the ensemble table. Throws ConfigError when
// every entry is a Failure; with some Failures the caller clamps them to the
// returned value (aurec() already does).
double epsilon_zero(const DistanceTable& best);

// (rho*eps0 - aurec_i) / (rho*eps0 - aurec_star). Throws DegenerateError
// when the denominator is not positive and DataError when the inputs violate
// aurec_star <= aurec_i <= rho*eps0 by more than 1e-12.
double local_optimality(double aurec_i, double aurec_star, double rho, double eps0);

// Arithmetic mean. Throws DataError when empty.
double global_optimality(std::span<const double> los);

struct RankEntry {
  std::string attack;
  double global_optimality = 0.0;
  double mean_queries = 0.0;  // forwards + backwards, averaged over samples
};

// Descending GO, then ascending mean queries, then name.
std::vector<RankEntry> rank(std::vector<RankEntry> entries);

struct CurvePoint {
  double epsilon;
  double robust_accuracy;
};

// Corners of the robust-accuracy step function: 0, every distinct finite
// distance within [0, eps0], and eps0.
std::vector<CurvePoint> robustness_curve(const DistanceTable& table, double eps0);

// "epsilon,robust_accuracy" header then one row per point, %.17g.
std::string curve_csv(std::span<const CurvePoint> points);

}  // namespace attackbench
