#include <fstream>
#include <sstream>

#include "attackbench/errors.hpp"
#include "attackbench/harness.hpp"
#include "json.hpp"

namespace attackbench {

using nlohmann::json;

DistanceTable distance_table(const AttackRecord& record) {
  DistanceTable t;
  t.p = record.p;
  for (const auto& [hash, r] : record.records) t.distances.emplace(hash, r.distance);
  return t;
}

std::string record_to_json(const AttackRecord& record) {
  json j;
  j["schema_version"] = record.schema_version;
  j["attack"] = record.attack;
  j["model"] = record.model;
  j["norm"] = to_string(record.p);
  j["budget"] = record.budget;
  if (record.search) {
    json s;
    s["steps"] = record.search->steps;
    s["eps_init"] = record.search->eps_init ? json(*record.search->eps_init) : json(nullptr);
    j["search"] = std::move(s);
  }
  json recs = json::object();
  for (const auto& [hash, r] : record.records) {
    json e;
    e["distance"] = r.distance ? json(*r.distance) : json(nullptr);
    e["forwards"] = r.forwards;
    e["backwards"] = r.backwards;
    e["time_s"] = r.time_s;
    if (r.error) e["error"] = *r.error;
    recs[hash] = std::move(e);
  }
  j["records"] = std::move(recs);
  j["meta"] = {{"timestamp", record.timestamp}, {"host", record.host}};
  return j.dump(2) + "\n";
}

namespace {

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw FormatError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(where + ": field '" + key + "' has the wrong type");
  }
}

std::uint64_t get_count(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<std::int64_t>() < 0) {
    throw FormatError(where + ": '" + key + "' must be a non-negative integer");
  }
  return j.at(key).get<std::uint64_t>();
}

}  // namespace

AttackRecord record_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("record is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("record must be a JSON object");
  AttackRecord r;
  r.schema_version = get<int>(j, "schema_version", "record");
  if (r.schema_version != 1) throw FormatError("unsupported schema_version " + std::to_string(r.schema_version));
  r.attack = get<std::string>(j, "attack", "record");
  r.model = get<std::string>(j, "model", "record");
  try {
    r.p = parse_norm(get<std::string>(j, "norm", "record"));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("record: ") + e.what());
  }
  r.budget = get_count(j, "budget", "record");
  if (j.contains("search") && !j["search"].is_null()) {
    const json& s = j["search"];
    if (!s.is_object()) throw FormatError("record: 'search' must be an object");
    SearchConfig cfg;
    cfg.steps = get<int>(s, "steps", "search");
    if (s.contains("eps_init") && !s["eps_init"].is_null()) cfg.eps_init = get<double>(s, "eps_init", "search");
    r.search = cfg;
  }
  if (!j.contains("records") || !j["records"].is_object()) throw FormatError("record: 'records' must be an object");
  for (const auto& [hash, e] : j["records"].items()) {
    const std::string where = "record entry " + hash;
    if (!e.is_object()) throw FormatError(where + ": must be an object");
    SampleResult s;
    if (!e.contains("distance")) throw FormatError(where + ": missing 'distance'");
    if (!e["distance"].is_null()) {
      if (!e["distance"].is_number()) throw FormatError(where + ": distance must be a number or null");
      const double d = e["distance"].get<double>();
      if (!(d >= 0.0)) throw FormatError(where + ": distance must be non-negative");
      s.distance = d;
    }
    s.forwards = get_count(e, "forwards", where);
    s.backwards = get_count(e, "backwards", where);
    if (s.forwards + s.backwards > r.budget) throw FormatError(where + ": queries exceed the budget");
    s.time_s = e.contains("time_s") ? get<double>(e, "time_s", where) : 0.0;
    if (e.contains("error") && !e["error"].is_null()) s.error = get<std::string>(e, "error", where);
    r.records.emplace(hash, std::move(s));
  }
  if (j.contains("meta") && j["meta"].is_object()) {
    const json& m = j["meta"];
    if (m.contains("timestamp") && m["timestamp"].is_string()) r.timestamp = m["timestamp"].get<std::string>();
    if (m.contains("host") && m["host"].is_string()) r.host = m["host"].get<std::string>();
  }
  return r;
}

void save_record(const AttackRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write record " + path.string());
  out << record_to_json(record);
  if (!out) throw IoError("error writing record " + path.string());
}

AttackRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open record " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return record_from_json(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace attackbench
