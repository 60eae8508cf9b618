#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adactrl/grpo.hpp"
#include "adactrl/parallel.hpp"
#include "adactrl/plotdata.hpp"
#include "adactrl/response_codec.hpp"
#include "adactrl/rewards.hpp"
#include "adactrl/rng.hpp"

namespace adactrl::sim {

using codec::DifficultyTag;

// A task with a latent difficulty in [0,1] and the discretized bucket the
// policy conditions on.
struct SyntheticTask {
  std::string id;
  double difficulty = 0.0;
  int bucket = 0;
};

int bucket_for_difficulty(double difficulty, int buckets);

// Annotated levels 1..9 map linearly onto [0,1].
double difficulty_from_level(int level);
int level_from_difficulty(double difficulty);

// P(correct | budget, difficulty) = logistic((budget - tau(d)) / width) with
// tau(d) = tau_min + d * (tau_max - tau_min). Increasing in budget,
// decreasing in difficulty.
struct SuccessModel {
  double tau_min = 200.0;
  double tau_max = 4200.0;
  double width = 300.0;

  double probability(double budget, double difficulty) const;
};

enum class Mode { Adaptive, ForceEasy, ForceHard };

std::string_view mode_name(Mode mode);

// Softmax policy over (difficulty-tag, budget-bin) decisions: one tag logit
// per bucket and a budget-logit row per (bucket, tag) over K log-spaced bins
// spanning [bin_lo, bin_hi] tokens.
class BudgetPolicy final : public grpo::PolicyInterface {
 public:
  BudgetPolicy(int buckets, int bins, double bin_lo = 16.0, double bin_hi = 24576.0);

  // Cold-start analog: tag logits seeded from empirical per-bucket Easy-tag
  // fractions; budget logits stay uniform.
  static BudgetPolicy from_easy_fractions(const std::vector<double>& easy_fractions,
                                          int bins, double bin_lo = 16.0,
                                          double bin_hi = 24576.0);

  int buckets() const { return buckets_; }
  int bins() const { return bins_; }
  double bin_lo() const { return bin_lo_; }
  double bin_hi() const { return bin_hi_; }
  const std::vector<double>& bin_centers() const { return centers_; }

  double tag_logit(int bucket) const;
  double easy_probability(int bucket) const;
  std::vector<double> bin_probabilities(int bucket, DifficultyTag tag) const;
  // Probability-weighted mean bin center.
  double expected_budget(int bucket, DifficultyTag tag) const;

  // PolicyInterface
  std::size_t parameter_count() const override;
  std::vector<double> parameters() const override;
  void set_parameters(std::span<const double> params) override;
  double decision_log_prob(const grpo::Decision& decision) const override;
  void add_log_prob_gradient(const grpo::Decision& decision, double weight,
                             std::span<double> grad) const override;

  grpo::Decision tag_decision(int bucket, DifficultyTag tag, bool forced) const;
  grpo::Decision bin_decision(int bucket, DifficultyTag tag, int bin) const;

  // Flat parameter layout: [tag logits (one per bucket)] then one bin-logit
  // row per (bucket, tag); this returns the row's offset.
  std::size_t budget_offset(int bucket, DifficultyTag tag) const;

 private:
  int buckets_;
  int bins_;
  double bin_lo_;
  double bin_hi_;
  std::vector<double> centers_;
  std::vector<double> params_;  // [tag logits (B)] [budget logits (B*2*K)]
};

// One sampled response: the structured record the reward pipeline sees plus
// the decision log-probs the update needs.
struct SimulatedRollout {
  rewards::RolloutRecord record;
  grpo::DecisionSequence decisions;
  int bucket = 0;
  double difficulty = 0.0;
};

// Adaptive mode samples the tag from the policy; forced modes fix it and mark
// the decision forced (log-prob 0, excluded from the ratio product). The
// budget bin is always a policy decision; correctness is drawn from the
// success model at the sampled budget.
SimulatedRollout sample_rollout(const BudgetPolicy& policy, const SyntheticTask& task,
                                Mode mode, const SuccessModel& success, Rng& rng);

struct SimulatorConfig {
  int buckets = 8;
  int bins = 32;
  double bin_lo = 16.0;
  double bin_hi = 24576.0;
  SuccessModel success;
  int batch_size = 8;  // task groups per update step
  std::optional<std::vector<double>> cold_start_easy_fractions;
  bool record_rollouts = false;  // keep per-step dumps for replay checks
};

struct BucketStats {
  std::uint64_t count = 0;
  double easy_proportion = 0.0;
  double mean_budget = 0.0;
  double accuracy = 0.0;
};

struct StepRecord {
  int step = 0;
  double mean_reward = 0.0;
  double accuracy = 0.0;
  double mean_budget = 0.0;
  double objective = 0.0;
  std::vector<BucketStats> buckets;
};

struct TrainHistory {
  std::vector<StepRecord> steps;
};

struct StepDump {
  std::vector<std::vector<SimulatedRollout>> groups;
  std::vector<std::vector<rewards::RewardBreakdown>> breakdowns;
};

struct TrainResult {
  BudgetPolicy policy;
  TrainHistory history;
  StepDump last_step;            // final step's groups, for export
  std::vector<StepDump> dumps;   // all steps, only when record_rollouts
};

// The full training loop: per step, sample a batch of task groups, score them
// with the three-part reward, take one clipped-objective ascent step. Fully
// deterministic given (tasks, configs, seed); rollout slots draw from
// independent streams derived from (seed, step, slot, rollout).
TrainResult run_training(const std::vector<SyntheticTask>& tasks,
                         const rewards::RewardConfig& reward_cfg,
                         const grpo::ClipConfig& clip_cfg, const SimulatorConfig& sim_cfg,
                         int steps, std::uint64_t seed,
                         Execution exec = Execution::Parallel);

struct ModeBucketSummary {
  std::uint64_t count = 0;
  double accuracy = 0.0;
  double mean_length = 0.0;
};

struct ModeEvaluation {
  Mode mode = Mode::Adaptive;
  std::vector<SimulatedRollout> rollouts;
  double accuracy = 0.0;
  double mean_length = 0.0;
  // Mean combined reward across per-task groups; present when
  // samples_per_task >= 2 (groups of one cannot be scored).
  std::optional<double> mean_reward;
  std::vector<ModeBucketSummary> buckets;
};

// Rolls out every task under Adaptive, ForceEasy and ForceHard.
std::vector<ModeEvaluation> evaluate_modes(const BudgetPolicy& policy,
                                           const std::vector<SyntheticTask>& tasks,
                                           const rewards::RewardConfig& reward_cfg,
                                           const SimulatorConfig& sim_cfg,
                                           int samples_per_task, std::uint64_t seed,
                                           Execution exec = Execution::Parallel);

// Round-robin pool over the given difficulties.
std::vector<SyntheticTask> make_mixed_tasks(const std::vector<double>& difficulties,
                                            int per_difficulty, int buckets);

// Per-bucket Easy-tag fraction of (difficulty, tag) pairs; 0.5 where empty.
std::vector<double> easy_tag_fractions(
    const std::vector<std::pair<double, DifficultyTag>>& difficulty_tag_pairs,
    int buckets);

// Tidy (x, series, value) rows for external plotting of the training curves.
std::vector<TidyRow> history_plot_rows(const TrainHistory& history);

}  // namespace adactrl::sim
