#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attackbench/attack.hpp"
#include "attackbench/dataset.hpp"
#include "attackbench/diffnet.hpp"
#include "attackbench/metrics.hpp"
#include "attackbench/types.hpp"

namespace attackbench {

// ---- benchmark records ----------------------------------------------------

struct SampleResult {
  std::optional<double> distance;  // empty = Failure (JSON null)
  std::uint64_t forwards = 0;
  std::uint64_t backwards = 0;
  double time_s = 0.0;
  std::optional<std::string> error;
};

struct AttackRecord {
  int schema_version = 1;
  std::string attack;
  std::string model;
  Norm p = Norm::L2;
  std::uint64_t budget = 0;
  std::optional<SearchConfig> search;  // eps_init resolved when present
  std::map<std::string, SampleResult> records;
  std::string timestamp;
  std::string host;
};

DistanceTable distance_table(const AttackRecord& record);

// Stable layout: sorted keys, two-space indent, trailing newline.
std::string record_to_json(const AttackRecord& record);
// Throws FormatError on schema violations.
AttackRecord record_from_json(std::string_view text);
void save_record(const AttackRecord& record, const std::filesystem::path& path);
AttackRecord load_record(const std::filesystem::path& path);

struct BenchmarkOptions {
  std::uint64_t budget = 2000;
  // Worker threads; 0 = hardware concurrency capped by ATTACKBENCH_THREADS.
  unsigned threads = 0;
};

// Attack benchmarking loop. Per sample: a budget-free clean prediction
// (misclassified samples get distance 0 and no queries), otherwise a fresh
// BenchModel, the attack (through the epsilon search for FixedBudget
// attacks with a search block), and the tracker's best distance, query
// counts and wall-clock time of the attack alone. Errors in one sample are
// recorded as a null distance with an error note.
AttackRecord benchmark(const AttackConfig& attack, const ModelParams& model, std::string model_id,
                       const Dataset& data, const BenchmarkOptions& options = {});

unsigned worker_threads(unsigned requested);

// ---- optimality and leaderboards ------------------------------------------

struct ModelOptimality {
  std::string model;
  Norm p = Norm::L2;
  double epsilon_zero = 0.0;
  double clean_accuracy = 0.0;
  double aurec_star = 0.0;
  bool failures_clamped = false;  // the ensemble failed on some samples
  std::map<std::string, double> aurec;
  std::map<std::string, double> local_optimality;
};

// Ensemble, eps0, AURECs and LO for every record of one (model, norm). Throws
// DataError naming the offending record when hash sets, models or norms
// differ.
ModelOptimality compute_local_optimality(std::span<const AttackRecord> records);

struct LeaderboardRow {
  std::string attack;
  double global_optimality = 0.0;
  double mean_forwards = 0.0;
  double mean_backwards = 0.0;
  double mean_time_s = 0.0;
  std::map<std::string, double> local_optimality;  // per model
};

struct LeaderboardGroup {
  Norm p = Norm::L2;
  std::vector<std::string> models;
  std::vector<LeaderboardRow> rows;  // ranked
};

struct Leaderboard {
  std::vector<LeaderboardGroup> groups;  // one per norm
  std::vector<ModelOptimality> models;   // one per (model, norm)
  // One line per record whose robust accuracy at unbounded epsilon is
  // nonzero, i.e. it failed on some correctly classified sample.
  std::vector<std::string> warnings;
};

Leaderboard build_leaderboard(std::span<const AttackRecord> records);
std::string leaderboard_to_json(const Leaderboard& board);

// Every *.json result file in dir (leaderboard.json excluded), sorted by
// file name. Throws IoError when dir is missing, DataError when it holds no
// records.
std::vector<AttackRecord> load_records_dir(const std::filesystem::path& dir);

// File name used inside a store: <attack>__<model>__<norm>.json, with
// characters outside [A-Za-z0-9._-] replaced by '_'.
std::string record_file_name(const AttackRecord& record);

// Adds a record to the store directory under an exclusive lock, then
// rebuilds and writes leaderboard.json. Stored records are never re-run or
// replaced: re-merging a record with the same attack/model/norm and the same
// distances and query counts is a no-op, a differing one is a DataError. Also
// throws DataError when the record's samples differ from those already
// stored for its model and norm.
Leaderboard merge_leaderboard(const std::filesystem::path& store, const AttackRecord& record);

}  // namespace attackbench
