// attackbench: build a model zoo, benchmark attacks, rank them and export
// robustness curves.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "attackbench/attack.hpp"
#include "attackbench/config_json.hpp"
#include "attackbench/dataset.hpp"
#include "attackbench/diffnet.hpp"
#include "attackbench/errors.hpp"
#include "attackbench/harness.hpp"
#include "attackbench/metrics.hpp"
#include "attackbench/train.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace attackbench;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kIo = 4 };

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

Dataset dataset_arg(const std::string& arg, std::uint64_t seed) {
  if (arg == "blobs") return generate_synthetic(SyntheticKind::Blobs, 500, 32, seed, 3);
  if (arg == "moons") return generate_synthetic(SyntheticKind::Moons, 500, 2, seed);
  return load_dataset(arg);
}

void print_board(const Leaderboard& board) {
  for (const auto& g : board.groups) {
    std::printf("norm %s, %zu model(s)\n", to_string(g.p).c_str(), g.models.size());
    std::printf("  %-20s %8s %10s %10s %12s\n", "attack", "GO", "mean #F", "mean #B", "mean time s");
    for (const auto& r : g.rows) {
      std::printf("  %-20s %8.4f %10.1f %10.1f %12.6f\n", r.attack.c_str(), r.global_optimality, r.mean_forwards,
                  r.mean_backwards, r.mean_time_s);
    }
  }
  for (const auto& w : board.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

// ---- subcommands ----------------------------------------------------------

struct ZooArgs {
  std::string dataset = "blobs";
  std::string out_dir = "zoo";
  std::uint64_t seed = 0;
  std::string adv_preset = "PGD-Linf";
  double adv_epsilon = 0.05;
  int adv_steps = 10;
  int epochs = 100;
  std::size_t hidden = 32;
};

int train_zoo(const ZooArgs& a) {
  const Dataset data = dataset_arg(a.dataset, a.seed);
  ensure_dir(a.out_dir);
  save_dataset(data, fs::path(a.out_dir) / "dataset.csv");

  const Architecture arch{{a.hidden}};
  TrainParams params;
  params.epochs = a.epochs;

  nlohmann::json manifest;
  manifest["dataset"] = "dataset.csv";
  manifest["models"] = nlohmann::json::array();
  const auto add = [&](const std::string& id, const std::optional<AttackConfig>& adv) {
    const ModelParams m = train(data, arch, params, adv, a.seed);
    const std::string file = id + ".abnet";
    save_model(m, fs::path(a.out_dir) / file);
    nlohmann::json entry = {{"id", id},
                            {"file", file},
                            {"hidden", arch.hidden},
                            {"epochs", params.epochs},
                            {"batch_size", params.batch_size},
                            {"learning_rate", params.learning_rate},
                            {"seed", a.seed},
                            {"train_accuracy", accuracy(m, data)}};
    entry["adversarial"] = adv ? nlohmann::json::parse(attack_config_to_json(*adv)) : nlohmann::json(nullptr);
    manifest["models"].push_back(std::move(entry));
    std::printf("%s: train accuracy %.4f\n", id.c_str(), accuracy(m, data));
  };

  add("plain", std::nullopt);
  if (!a.adv_preset.empty() && a.adv_preset != "none") {
    AttackConfig adv = resolve_attack(a.adv_preset);
    if (adv.mode == AttackMode::FixedBudget) {
      adv.epsilon = a.adv_epsilon;
      adv.search.reset();
    }
    adv.steps = a.adv_steps;
    add("adv", adv);
  }
  write_text(fs::path(a.out_dir) / "zoo.json", manifest.dump(2) + "\n");
  return kOk;
}

struct RunArgs {
  std::string attack;
  std::string model;
  std::string model_id;
  std::string dataset;
  std::string norm;
  std::uint64_t budget = 2000;
  unsigned threads = 0;
  std::string out;
};

int run(const RunArgs& a) {
  AttackConfig cfg = resolve_attack(a.attack);
  if (!a.norm.empty()) cfg.p = parse_norm(a.norm);
  cfg.validate();
  const ModelParams model = load_model(a.model);
  const Dataset data = load_dataset(a.dataset);
  BenchmarkOptions opts;
  opts.budget = a.budget;
  opts.threads = a.threads;
  const std::string id = a.model_id.empty() ? fs::path(a.model).stem().string() : a.model_id;
  const AttackRecord record = benchmark(cfg, model, id, data, opts);
  std::size_t failed = 0;
  for (const auto& [h, r] : record.records) failed += !r.distance;
  const fs::path out = a.out.empty() ? fs::path(record_file_name(record)) : fs::path(a.out);
  save_record(record, out);
  std::printf("%s on %s (%s): %zu samples, %zu failures -> %s\n", record.attack.c_str(), record.model.c_str(),
              to_string(record.p).c_str(), record.records.size(), failed, out.string().c_str());
  return kOk;
}

int rank_cmd(const std::string& dir, const std::string& out) {
  const auto records = load_records_dir(dir);
  const Leaderboard board = build_leaderboard(records);
  if (!out.empty()) write_text(out, leaderboard_to_json(board));
  print_board(board);
  return kOk;
}

int merge_cmd(const std::string& store, const std::string& record_path) {
  const AttackRecord record = load_record(record_path);
  print_board(merge_leaderboard(store, record));
  return kOk;
}

int curves_cmd(const std::string& dir, const std::string& model, const std::string& norm, const std::string& out_dir) {
  const Norm p = parse_norm(norm);
  std::vector<AttackRecord> records;
  for (auto& r : load_records_dir(dir)) {
    if (r.model == model && r.p == p) records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError("no records for model '" + model + "' under " + to_string(p));
  const ModelOptimality mo = compute_local_optimality(records);
  ensure_dir(out_dir);
  std::vector<DistanceTable> tables;
  for (const auto& r : records) {
    tables.push_back(distance_table(r));
    const auto curve = robustness_curve(tables.back(), mo.epsilon_zero);
    write_text(fs::path(out_dir) / fs::path(record_file_name(r)).replace_extension(".csv"), curve_csv(curve));
  }
  const auto best = robustness_curve(ensemble_best(tables), mo.epsilon_zero);
  write_text(fs::path(out_dir) / "ensemble.csv", curve_csv(best));
  std::printf("epsilon_zero %.17g, %zu curve(s) plus ensemble -> %s\n", mo.epsilon_zero, records.size(),
              out_dir.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark gradient-based adversarial attacks under a query budget"};
  app.require_subcommand(1);

  ZooArgs zoo;
  auto* z = app.add_subcommand("train-zoo", "Train a plain and an adversarially trained model");
  z->add_option("--dataset", zoo.dataset, "CSV file, or 'blobs' / 'moons' for a synthetic set");
  z->add_option("--out-dir", zoo.out_dir, "Output directory")->required();
  z->add_option("--seed", zoo.seed, "Seed for data, init and shuffling");
  z->add_option("--adv-preset", zoo.adv_preset, "Attack used for adversarial training ('none' to skip)");
  z->add_option("--adv-epsilon", zoo.adv_epsilon, "Epsilon of the training attack");
  z->add_option("--adv-steps", zoo.adv_steps, "Steps of the training attack");
  z->add_option("--epochs", zoo.epochs, "Training epochs");
  z->add_option("--hidden", zoo.hidden, "Hidden layer width");

  RunArgs ra;
  auto* r = app.add_subcommand("run", "Benchmark one attack on one model");
  r->add_option("--attack", ra.attack, "Preset name or attack config JSON")->required();
  r->add_option("--model", ra.model, "Model file")->required();
  r->add_option("--model-id", ra.model_id, "Model id stored in the record (default: file stem)");
  r->add_option("--dataset", ra.dataset, "Dataset CSV")->required();
  r->add_option("--norm", ra.norm, "Threat model override: l0, l1, l2, linf");
  r->add_option("--budget", ra.budget, "Query budget per sample")->capture_default_str();
  r->add_option("--threads", ra.threads, "Worker threads (0 = all, capped by ATTACKBENCH_THREADS)");
  r->add_option("--out", ra.out, "Record file to write");

  std::string records_dir, out, store, record, model, norm, out_dir;
  auto* k = app.add_subcommand("rank", "Rank the records in a directory");
  k->add_option("--records-dir", records_dir, "Directory of record files")->required();
  k->add_option("--out", out, "Leaderboard JSON to write");

  auto* m = app.add_subcommand("merge", "Merge a record into a leaderboard store");
  m->add_option("--store", store, "Store directory")->required();
  m->add_option("--record", record, "Record file")->required();

  auto* c = app.add_subcommand("curves", "Export robustness evaluation curves as CSV");
  c->add_option("--records-dir", records_dir, "Directory of record files")->required();
  c->add_option("--model", model, "Model id")->required();
  c->add_option("--norm", norm, "Threat model")->required();
  c->add_option("--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*z) return train_zoo(zoo);
    if (*r) return run(ra);
    if (*k) return rank_cmd(records_dir, out);
    if (*m) return merge_cmd(store, record);
    if (*c) return curves_cmd(records_dir, model, norm, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  }
  return kUsage;
}
