#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adactrl/grpo.hpp"
#include "adactrl/rewards.hpp"
#include "adactrl/simulator.hpp"

namespace adactrl::cli {

// Effective configuration is a flat dotted-key JSON object. Precedence:
// built-in defaults, then the config file, then explicit overrides; the last
// writer wins. Unknown keys are rejected.
nlohmann::json default_config();

nlohmann::json resolve_config(const std::optional<std::string>& config_path,
                              const std::vector<std::string>& key_value_overrides,
                              const std::optional<std::uint64_t>& seed_flag);

// FNV-1a 64 over the canonical dump, as 16 hex digits. Stamped into every
// manifest/report so outputs are traceable to their exact configuration.
std::string config_hash(const nlohmann::json& config);

std::uint64_t seed_of(const nlohmann::json& config);
rewards::RewardConfig reward_config(const nlohmann::json& config);
grpo::ClipConfig clip_config(const nlohmann::json& config);
sim::SimulatorConfig simulator_config(const nlohmann::json& config);
std::vector<sim::SyntheticTask> training_tasks(const nlohmann::json& config);
std::vector<sim::SyntheticTask> evaluation_tasks(const nlohmann::json& config);

// Subcommand bodies. They throw (MalformedInput / IoError / DivergedError /
// std::invalid_argument) and return 0 on success; run_guarded maps throws to
// the documented exit codes: 1 I/O, 2 malformed input, 3 divergence.
int cmd_score(const std::string& groups_file, const nlohmann::json& config,
              const std::string& out_dir);
int cmd_curate(const std::string& problems_file, const std::string& candidates_file,
               const nlohmann::json& config, const std::string& out_dir);
int cmd_simulate(const nlohmann::json& config, const std::string& out_dir,
                 const std::string& mode = "all");
int cmd_evaluate(const std::vector<std::string>& records_files, bool repeats,
                 const nlohmann::json& config, const std::string& out_dir);

int run_guarded(const std::function<int()>& body);

}  // namespace adactrl::cli
