#include "adactrl/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace adactrl::rewards {

double outcome_reward(bool correct) { return correct ? 1.0 : -1.0; }

DifficultyTag golden_tag(std::span<const bool> correct_flags, double delta) {
  if (correct_flags.empty()) throw std::invalid_argument("empty rollout group");
  std::size_t correct = 0;
  for (bool f : correct_flags) correct += f ? 1 : 0;
  const double frequency =
      static_cast<double>(correct) / static_cast<double>(correct_flags.size());
  return frequency >= delta ? DifficultyTag::Easy : DifficultyTag::Hard;
}

double calibration_reward(std::optional<DifficultyTag> tag, DifficultyTag golden) {
  if (!tag.has_value()) return -1.0;
  return *tag == golden ? 1.0 : 0.0;
}

double length_reward(std::optional<DifficultyTag> tag, std::uint64_t length,
                     std::uint64_t group_max) {
  if (length > group_max) throw std::invalid_argument("length outside group range");
  if (tag != DifficultyTag::Easy) return 0.0;
  if (group_max == 0) return 1.0;
  const double ratio = static_cast<double>(length) / static_cast<double>(group_max);
  return 1.0 - (1.0 - std::cos(ratio * std::numbers::pi)) / 2.0;
}

double combined_reward(double outcome, double calibration, double length_rew,
                       const RewardConfig& config) {
  return outcome + config.alpha * calibration + config.beta * length_rew;
}

std::vector<RewardBreakdown> score_group(std::span<const RolloutRecord> rollouts,
                                         const RewardConfig& config) {
  if (rollouts.empty()) throw std::invalid_argument("empty rollout group");
  if (rollouts.size() < 2) throw std::invalid_argument("degenerate group");
  for (const auto& r : rollouts) {
    if (r.problem_id != rollouts.front().problem_id) {
      throw std::invalid_argument("mixed problem ids in rollout group");
    }
  }

  std::unique_ptr<bool[]> flags(new bool[rollouts.size()]);
  std::uint64_t group_max = 0;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    flags[i] = rollouts[i].correct;
    group_max = std::max(group_max, rollouts[i].length);
  }
  const DifficultyTag golden =
      golden_tag(std::span<const bool>(flags.get(), rollouts.size()), config.delta);

  std::vector<RewardBreakdown> out(rollouts.size());
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    RewardBreakdown& b = out[i];
    b.outcome = outcome_reward(rollouts[i].correct);
    b.calibration = calibration_reward(rollouts[i].tag, golden);
    b.length_reward = length_reward(rollouts[i].tag, rollouts[i].length, group_max);
    b.combined = combined_reward(b.outcome, b.calibration, b.length_reward, config);
    b.golden_tag = golden;
  }
  return out;
}

std::vector<std::vector<RewardBreakdown>> score_groups(
    std::span<const std::vector<RolloutRecord>> groups, const RewardConfig& config,
    Execution exec) {
  std::vector<std::vector<RewardBreakdown>> out(groups.size());
  for_each_index(groups.size(), exec, [&](std::size_t g) {
    out[g] = score_group(groups[g], config);
  });
  return out;
}

std::vector<std::vector<RewardBreakdown>> score_groups_serial(
    std::span<const std::vector<RolloutRecord>> groups, const RewardConfig& config) {
  return score_groups(groups, config, Execution::Serial);
}

}  // namespace adactrl::rewards
