#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "attackbench/attack.hpp"

namespace attackbench {

// AttackConfig <-> JSON. Keys: name, mode, p, loss, init, direction,
// optimizer, scheduler, steps, step_size, margin, seed, epsilon, plus the
// optional "search" {steps, eps_init} and "strategy" blocks. init, optimizer
// and scheduler accept either a bare kind string or an object with "kind".
// Malformed documents throw ConfigError.
std::string attack_config_to_json(const AttackConfig& config);
AttackConfig attack_config_from_json(std::string_view text);

AttackConfig load_attack_config(const std::filesystem::path& path);

// Preset name, or a path to a JSON config file.
AttackConfig resolve_attack(const std::string& preset_or_path);

}  // namespace attackbench
