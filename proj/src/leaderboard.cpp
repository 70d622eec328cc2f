#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "attackbench/errors.hpp"
#include "attackbench/harness.hpp"
#include "json.hpp"

namespace attackbench {

using nlohmann::json;

namespace {

std::string label_of(const AttackRecord& r) {
  return "'" + r.attack + "' (model '" + r.model + "', " + to_string(r.p) + ")";
}

bool same_keys(const AttackRecord& a, const AttackRecord& b) {
  if (a.records.size() != b.records.size()) return false;
  return std::equal(a.records.begin(), a.records.end(), b.records.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; });
}

bool same_results(const AttackRecord& a, const AttackRecord& b) {
  if (!same_keys(a, b) || a.budget != b.budget) return false;
  return std::equal(a.records.begin(), a.records.end(), b.records.begin(), [](const auto& x, const auto& y) {
    return x.second.distance == y.second.distance && x.second.forwards == y.second.forwards &&
           x.second.backwards == y.second.backwards;
  });
}

double residual(const AttackRecord& r) {
  if (r.records.empty()) return 0.0;
  std::size_t failed = 0;
  for (const auto& [h, s] : r.records) failed += !s.distance.has_value();
  return static_cast<double>(failed) / static_cast<double>(r.records.size());
}

}  // namespace

ModelOptimality compute_local_optimality(std::span<const AttackRecord> records) {
  if (records.empty()) throw DataError("no records to compare");
  const AttackRecord& ref = records.front();
  std::set<std::string> names;
  std::vector<DistanceTable> tables;
  for (const auto& r : records) {
    if (r.model != ref.model || r.p != ref.p) {
      throw DataError("record " + label_of(r) + " does not match " + label_of(ref));
    }
    if (!same_keys(r, ref)) throw DataError("record " + label_of(r) + " covers different samples than " + label_of(ref));
    if (!names.insert(r.attack).second) throw DataError("duplicate record " + label_of(r));
    tables.push_back(distance_table(r));
  }
  if (ref.records.empty()) throw DataError("record " + label_of(ref) + " has no samples");

  ModelOptimality out;
  out.model = ref.model;
  out.p = ref.p;
  const DistanceTable best = ensemble_best(tables);
  try {
    out.epsilon_zero = epsilon_zero(best);
  } catch (const ConfigError&) {
    throw DataError("every attack failed on every sample of model '" + ref.model + "'");
  }
  if (!(out.epsilon_zero > 0.0)) throw DataError("every sample of model '" + ref.model + "' is misclassified");
  for (const auto& [h, d] : best.distances) out.failures_clamped = out.failures_clamped || !d;
  out.clean_accuracy = clean_accuracy(best);
  out.aurec_star = aurec(best, out.epsilon_zero);
  const double box = out.clean_accuracy * out.epsilon_zero;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double a = aurec(tables[i], out.epsilon_zero);
    out.aurec[records[i].attack] = a;
    try {
      out.local_optimality[records[i].attack] = local_optimality(std::min(a, box), out.aurec_star,
                                                                 out.clean_accuracy, out.epsilon_zero);
    } catch (const DegenerateError& e) {
      throw DataError("model '" + ref.model + "': " + e.what());
    }
  }
  return out;
}

Leaderboard build_leaderboard(std::span<const AttackRecord> records) {
  if (records.empty()) throw DataError("no records to rank");
  std::map<Norm, std::map<std::string, std::vector<AttackRecord>>> grouped;
  for (const auto& r : records) grouped[r.p][r.model].push_back(r);

  Leaderboard board;
  for (const auto& [p, by_model] : grouped) {
    LeaderboardGroup group;
    group.p = p;
    struct Acc {
      std::vector<double> los;
      std::map<std::string, double> per_model;
      double forwards = 0, backwards = 0, time = 0;
      std::size_t samples = 0;
    };
    std::map<std::string, Acc> acc;
    for (const auto& [model, recs] : by_model) {
      group.models.push_back(model);
      ModelOptimality mo = compute_local_optimality(recs);
      for (const auto& r : recs) {
        Acc& a = acc[r.attack];
        const double lo = mo.local_optimality.at(r.attack);
        a.los.push_back(lo);
        a.per_model[model] = lo;
        for (const auto& [h, s] : r.records) {
          a.forwards += static_cast<double>(s.forwards);
          a.backwards += static_cast<double>(s.backwards);
          a.time += s.time_s;
        }
        a.samples += r.records.size();
        const double res = residual(r);
        if (res > 0.0) {
          board.warnings.push_back("attack '" + r.attack + "' on model '" + model + "' (" + to_string(p) +
                                   ") failed on " + std::to_string(res * 100.0) +
                                   "% of samples even at unbounded epsilon; check its configuration");
        }
      }
      board.models.push_back(std::move(mo));
    }
    std::vector<RankEntry> entries;
    std::map<std::string, LeaderboardRow> rows;
    for (const auto& [name, a] : acc) {
      LeaderboardRow row;
      row.attack = name;
      row.global_optimality = global_optimality(a.los);
      const double n = static_cast<double>(std::max<std::size_t>(a.samples, 1));
      row.mean_forwards = a.forwards / n;
      row.mean_backwards = a.backwards / n;
      row.mean_time_s = a.time / n;
      row.local_optimality = a.per_model;
      entries.push_back({name, row.global_optimality, row.mean_forwards + row.mean_backwards});
      rows.emplace(name, std::move(row));
    }
    for (const auto& e : rank(std::move(entries))) group.rows.push_back(rows.at(e.attack));
    board.groups.push_back(std::move(group));
  }
  return board;
}

std::string leaderboard_to_json(const Leaderboard& board) {
  json j;
  json groups = json::array();
  for (const auto& g : board.groups) {
    json rankings = json::array();
    for (const auto& r : g.rows) {
      rankings.push_back({{"attack", r.attack},
                          {"GO", r.global_optimality},
                          {"mean_forwards", r.mean_forwards},
                          {"mean_backwards", r.mean_backwards},
                          {"mean_time_s", r.mean_time_s},
                          {"local_optimality", r.local_optimality}});
    }
    groups.push_back({{"norm", to_string(g.p)}, {"models", g.models}, {"rankings", std::move(rankings)}});
  }
  json models = json::array();
  for (const auto& m : board.models) {
    models.push_back({{"model", m.model},
                      {"norm", to_string(m.p)},
                      {"epsilon_zero", m.epsilon_zero},
                      {"clean_accuracy", m.clean_accuracy},
                      {"aurec_star", m.aurec_star},
                      {"failures_clamped", m.failures_clamped},
                      {"aurec", m.aurec},
                      {"local_optimality", m.local_optimality}});
  }
  j["groups"] = std::move(groups);
  j["models"] = std::move(models);
  j["warnings"] = board.warnings;
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::filesystem::path> record_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const auto& path = entry.path();
    if (entry.is_regular_file() && path.extension() == ".json" && path.filename() != "leaderboard.json") {
      files.push_back(path);
    }
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp);
    out << text;
    if (!out) throw IoError("error writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

class StoreLock {
 public:
  explicit StoreLock(const std::filesystem::path& file) {
    fd_ = ::open(file.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
      if (fd_ >= 0) ::close(fd_);
      throw IoError("cannot lock " + file.string());
    }
  }
  ~StoreLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

std::vector<AttackRecord> load_records_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<AttackRecord> out;
  for (const auto& f : record_files(dir)) out.push_back(load_record(f));
  if (out.empty()) throw DataError("no record files in " + dir.string());
  return out;
}

std::string record_file_name(const AttackRecord& record) {
  std::string name = record.attack + "__" + record.model + "__" + to_string(record.p);
  for (char& c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return name + ".json";
}

Leaderboard merge_leaderboard(const std::filesystem::path& store, const AttackRecord& record) {
  std::error_code ec;
  std::filesystem::create_directories(store, ec);
  if (ec || !std::filesystem::is_directory(store)) throw IoError("cannot create store " + store.string());
  StoreLock lock(store / ".lock");

  std::vector<AttackRecord> records;
  for (const auto& f : record_files(store)) records.push_back(load_record(f));

  bool duplicate = false;
  for (const auto& r : records) {
    if (r.model != record.model || r.p != record.p) continue;
    if (!same_keys(r, record)) {
      throw DataError("record " + label_of(record) + " covers different samples than stored " + label_of(r));
    }
    if (r.attack == record.attack) {
      if (!same_results(r, record)) {
        throw DataError("store already holds a different result for " + label_of(record));
      }
      duplicate = true;
    }
  }
  if (!duplicate) records.push_back(record);

  Leaderboard board = build_leaderboard(records);
  if (!duplicate) save_record(record, store / record_file_name(record));
  write_atomic(store / "leaderboard.json", leaderboard_to_json(board));
  return board;
}

}  // namespace attackbench
