#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adactrl/parallel.hpp"
#include "adactrl/response_codec.hpp"

namespace adactrl::rewards {

using codec::DifficultyTag;

struct RewardConfig {
  double alpha = 0.5;   // weight of the calibration reward
  double beta = 0.5;    // weight of the length reward
  double delta = 0.625; // easy threshold on group accuracy
  int group_size = 16;  // rollouts sampled per problem
};

struct RolloutRecord {
  std::string problem_id;
  std::optional<DifficultyTag> tag;
  bool correct = false;
  std::uint64_t length = 0;  // tokens
};

struct RewardBreakdown {
  double outcome = 0.0;       // +1 / -1
  double calibration = 0.0;   // +1 / 0 / -1
  double length_reward = 0.0; // [0, 1], Easy-tagged only
  double combined = 0.0;      // outcome + alpha*calibration + beta*length_reward
  DifficultyTag golden_tag = DifficultyTag::Hard;
};

// +1.0 when correct, -1.0 otherwise.
double outcome_reward(bool correct);

// Easy iff the fraction of correct rollouts reaches delta (inclusive), Hard
// otherwise. Throws on an empty group.
DifficultyTag golden_tag(std::span<const bool> correct_flags, double delta);

// +1 when the generated tag matches the golden tag, 0 on mismatch, -1 when
// the tag is missing.
double calibration_reward(std::optional<DifficultyTag> tag, DifficultyTag golden);

// Cosine conciseness bonus for Easy-tagged rollouts, normalized by the group
// maximum; 0 otherwise. group_max == 0 counts as ratio 0. Throws when length
// lies outside [0, group_max].
double length_reward(std::optional<DifficultyTag> tag, std::uint64_t length,
                     std::uint64_t group_max);

double combined_reward(double outcome, double calibration, double length_rew,
                       const RewardConfig& config);

// Scores one rollout group: golden tag from the group's correct flags,
// group_max from its lengths, one breakdown per rollout in input order.
// Throws on groups smaller than 2 or mixed problem ids.
std::vector<RewardBreakdown> score_group(std::span<const RolloutRecord> rollouts,
                                         const RewardConfig& config);

// Batch kernel over independent groups. The parallel path assigns one group
// per slot and is bitwise-identical to the serial reference.
std::vector<std::vector<RewardBreakdown>> score_groups(
    std::span<const std::vector<RolloutRecord>> groups, const RewardConfig& config,
    Execution exec = Execution::Parallel);

std::vector<std::vector<RewardBreakdown>> score_groups_serial(
    std::span<const std::vector<RolloutRecord>> groups, const RewardConfig& config);

}  // namespace adactrl::rewards
