#include "attackbench/config_json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "attackbench/errors.hpp"
#include "json.hpp"

namespace attackbench {
namespace {

using nlohmann::json;

template <typename Enum, std::size_t N>
Enum parse_enum(const json& j, const char* field, const std::pair<const char*, Enum> (&table)[N]) {
  if (!j.is_string()) throw ConfigError(std::string("field '") + field + "' must be a string");
  const auto text = j.get<std::string>();
  for (const auto& [key, value] : table) {
    if (text == key) return value;
  }
  throw ConfigError(std::string("field '") + field + "' has unknown value '" + text + "'");
}

constexpr std::pair<const char*, AttackMode> kModes[] = {{"MinNorm", AttackMode::MinNorm},
                                                         {"FixedBudget", AttackMode::FixedBudget}};
constexpr std::pair<const char*, LossKind> kLosses[] = {{"Logit", LossKind::Logit},
                                                        {"Softmax", LossKind::Softmax},
                                                        {"NCE", LossKind::NCE},
                                                        {"DL", LossKind::DL},
                                                        {"DLR", LossKind::DLR}};
constexpr std::pair<const char*, InitKind> kInits[] = {
    {"Zero", InitKind::Zero}, {"Random", InitKind::Random}, {"Adv", InitKind::Adv}};
constexpr std::pair<const char*, DirectionKind> kDirections[] = {
    {"Grad", DirectionKind::Grad}, {"Norm", DirectionKind::Norm}, {"Proj", DirectionKind::Proj}};
constexpr std::pair<const char*, OptimizerKind> kOptimizers[] = {
    {"GD", OptimizerKind::GD}, {"GDMomentum", OptimizerKind::GDMomentum}, {"Adam", OptimizerKind::Adam}};
constexpr std::pair<const char*, SchedulerKind> kSchedulers[] = {{"Fixed", SchedulerKind::Fixed},
                                                                 {"Lin", SchedulerKind::Lin},
                                                                 {"Cos", SchedulerKind::Cos},
                                                                 {"Exp", SchedulerKind::Exp},
                                                                 {"RoP", SchedulerKind::RoP}};
constexpr std::pair<const char*, NormStrategy> kStrategies[] = {{"None", NormStrategy::None},
                                                                {"DDN", NormStrategy::DDN},
                                                                {"FMN", NormStrategy::FMN},
                                                                {"Penalty", NormStrategy::Penalty}};

// Object-or-string slot: returns the "kind" node and the object (or null).
std::pair<json, json> kind_of(const json& j, const char* field) {
  if (j.is_string()) return {j, json::object()};
  if (j.is_object() && j.contains("kind")) return {j.at("kind"), j};
  throw ConfigError(std::string("field '") + field + "' must be a string or an object with 'kind'");
}

template <typename T>
T number(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<T>();
}

}  // namespace

std::string attack_config_to_json(const AttackConfig& c) {
  json j;
  j["name"] = c.name;
  j["mode"] = to_string(c.mode);
  j["p"] = to_string(c.p);
  j["loss"] = to_string(c.loss);
  json init = {{"kind", to_string(c.init.kind)}};
  if (c.init.kind == InitKind::Random) init["radius"] = c.init.radius;
  if (c.init.start) init["start"] = *c.init.start;
  j["init"] = init;
  j["direction"] = to_string(c.direction);
  json opt = {{"kind", to_string(c.optimizer.kind)}};
  if (c.optimizer.kind == OptimizerKind::GDMomentum) opt["beta"] = c.optimizer.beta;
  if (c.optimizer.kind == OptimizerKind::Adam) {
    opt["beta1"] = c.optimizer.beta1;
    opt["beta2"] = c.optimizer.beta2;
    opt["eps"] = c.optimizer.adam_eps;
  }
  j["optimizer"] = opt;
  json sched = {{"kind", to_string(c.scheduler.kind)}};
  switch (c.scheduler.kind) {
    case SchedulerKind::Lin:
    case SchedulerKind::Exp: sched["gamma"] = c.scheduler.gamma; break;
    case SchedulerKind::Cos: sched["final_step"] = c.scheduler.final_step; break;
    case SchedulerKind::RoP:
      sched["patience"] = c.scheduler.patience;
      sched["factor"] = c.scheduler.factor;
      break;
    case SchedulerKind::Fixed: break;
  }
  j["scheduler"] = sched;
  j["steps"] = c.steps;
  j["step_size"] = c.step_size;
  j["margin"] = c.margin;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
  if (c.search) {
    j["search"] = {{"steps", c.search->steps},
                   {"eps_init", c.search->eps_init ? json(*c.search->eps_init) : json(nullptr)}};
  }
  if (c.strategy.kind != NormStrategy::None) {
    json s = {{"kind", to_string(c.strategy.kind)}};
    switch (c.strategy.kind) {
      case NormStrategy::DDN:
        s["gamma"] = c.strategy.gamma;
        s["init_epsilon"] = c.strategy.init_epsilon;
        break;
      case NormStrategy::FMN:
        s["gamma"] = c.strategy.gamma;
        s["gamma_final"] = c.strategy.gamma_final;
        break;
      case NormStrategy::Penalty: s["penalty_weights"] = c.strategy.penalty_weights; break;
      case NormStrategy::None: break;
    }
    j["strategy"] = s;
  }
  return j.dump(2);
}

AttackConfig attack_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("attack config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("attack config must be a JSON object");

  try {
    AttackConfig c;
    for (const char* required : {"mode", "p", "loss", "init", "direction", "optimizer", "scheduler", "steps", "step_size"}) {
      if (!j.contains(required)) throw ConfigError(std::string("attack config is missing '") + required + "'");
    }
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    c.mode = parse_enum(j.at("mode"), "mode", kModes);
    if (!j.at("p").is_string()) throw ConfigError("field 'p' must be a string");
    c.p = parse_norm(j.at("p").get<std::string>());
    c.loss = parse_enum(j.at("loss"), "loss", kLosses);

    auto [init_kind, init] = kind_of(j.at("init"), "init");
    c.init.kind = parse_enum(init_kind, "init", kInits);
    c.init.radius = number(init, "radius", c.init.kind == InitKind::Random ? 1.0 : 0.0);
    if (init.contains("start") && !init.at("start").is_null()) c.init.start = init.at("start").get<Vector>();

    c.direction = parse_enum(j.at("direction"), "direction", kDirections);

    auto [opt_kind, opt] = kind_of(j.at("optimizer"), "optimizer");
    c.optimizer.kind = parse_enum(opt_kind, "optimizer", kOptimizers);
    c.optimizer.beta = number(opt, "beta", c.optimizer.beta);
    c.optimizer.beta1 = number(opt, "beta1", c.optimizer.beta1);
    c.optimizer.beta2 = number(opt, "beta2", c.optimizer.beta2);
    c.optimizer.adam_eps = number(opt, "eps", c.optimizer.adam_eps);

    auto [sched_kind, sched] = kind_of(j.at("scheduler"), "scheduler");
    c.scheduler.kind = parse_enum(sched_kind, "scheduler", kSchedulers);
    c.scheduler.gamma = number(sched, "gamma", c.scheduler.gamma);
    c.scheduler.final_step = number(sched, "final_step", c.scheduler.final_step);
    c.scheduler.patience = number(sched, "patience", c.scheduler.patience);
    c.scheduler.factor = number(sched, "factor", c.scheduler.factor);

    c.steps = number(j, "steps", c.steps);
    c.step_size = number(j, "step_size", c.step_size);
    c.margin = number(j, "margin", c.margin);
    c.seed = number<std::uint64_t>(j, "seed", 0);
    if (j.contains("epsilon") && !j.at("epsilon").is_null()) c.epsilon = number(j, "epsilon", 0.0);

    if (j.contains("search") && !j.at("search").is_null()) {
      const auto& s = j.at("search");
      if (!s.is_object()) throw ConfigError("field 'search' must be an object");
      SearchConfig sc;
      sc.steps = number(s, "steps", sc.steps);
      if (s.contains("eps_init") && !s.at("eps_init").is_null()) sc.eps_init = number(s, "eps_init", 1.0);
      c.search = sc;
    } else if (c.mode == AttackMode::FixedBudget && !c.epsilon) {
      c.search = SearchConfig{};
    }

    if (j.contains("strategy") && !j.at("strategy").is_null()) {
      auto [strat_kind, strat] = kind_of(j.at("strategy"), "strategy");
      c.strategy.kind = parse_enum(strat_kind, "strategy", kStrategies);
      c.strategy.gamma = number(strat, "gamma", c.strategy.gamma);
      c.strategy.gamma_final = number(strat, "gamma_final", c.strategy.gamma_final);
      c.strategy.init_epsilon = number(strat, "init_epsilon", c.strategy.init_epsilon);
      if (strat.contains("penalty_weights")) c.strategy.penalty_weights = strat.at("penalty_weights").get<std::vector<double>>();
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("attack config has a malformed field: ") + e.what());
  }
}

AttackConfig load_attack_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open attack config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  AttackConfig c = attack_config_from_json(buf.str());
  if (c.name == "custom") c.name = path.stem().string();
  return c;
}

AttackConfig resolve_attack(const std::string& preset_or_path) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), preset_or_path) != names.end()) return preset(preset_or_path);
  if (std::filesystem::exists(preset_or_path)) return load_attack_config(preset_or_path);
  throw ConfigError("'" + preset_or_path + "' is neither a preset nor a config file");
}

}  // namespace attackbench
