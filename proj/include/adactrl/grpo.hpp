#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adactrl/parallel.hpp"

namespace adactrl::grpo {

enum class Optimizer { Ascent, Adam };

struct ClipConfig {
  double epsilon = 0.2;        // clip radius
  double std_floor = 1e-6;     // guard for near-zero-variance groups
  double learning_rate = 1e-6; // overridable; the simulator profile raises it
  double kl_weight = 0.0;      // fixed at 0 in all shipped configurations
  Optimizer optimizer = Optimizer::Ascent;
};

struct GroupAdvantages {
  std::vector<double> values;  // zero-mean unless the group is constant
};

// One sampled decision. `key` is an encoding only the owning policy
// interprets; `log_prob` is the probability the decision had under the
// sampling (old) policy. Forced decisions are not policy decisions: they are
// excluded from the ratio product and never generate gradient.
struct Decision {
  std::uint64_t key = 0;
  double log_prob = 0.0;
  bool forced = false;
};

using DecisionSequence = std::vector<Decision>;

// Abstract differentiable policy. Implementations must keep log_prob finite
// for any decision they can sample.
class PolicyInterface {
 public:
  virtual ~PolicyInterface() = default;

  virtual std::size_t parameter_count() const = 0;
  virtual std::vector<double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> params) = 0;

  // Log-probability of one decision under the current parameters.
  virtual double decision_log_prob(const Decision& decision) const = 0;

  // Adds weight * d(log pi(decision))/d(theta) into grad.
  virtual void add_log_prob_gradient(const Decision& decision, double weight,
                                     std::span<double> grad) const = 0;

  // Sequence-level helpers built on the per-decision primitives. Forced
  // decisions contribute log-prob 0 and no gradient.
  double log_prob(const DecisionSequence& seq) const;
  std::vector<double> log_prob_gradient(const DecisionSequence& seq) const;
};

// (r - mean) / max(population_std, std_floor); exact zeros for constant
// groups. Throws "degenerate group" for fewer than two rewards.
GroupAdvantages normalize_advantages(std::span<const double> rewards, double std_floor);

// min(ratio*A, clip(ratio, 1-eps, 1+eps)*A). Throws on nonpositive ratios.
double clipped_term(double ratio, double advantage, double epsilon);

// Numeric form of the clipped objective: per-rollout old/new log-prob
// sequences with one advantage broadcast across the rollout's decisions.
struct RolloutTerms {
  std::vector<double> old_log_probs;
  std::vector<double> new_log_probs;
  double advantage = 0.0;
};

using GroupTerms = std::vector<RolloutTerms>;

// Mean over groups of (1/G) sum_i (1/|o_i|) sum_t clipped_term. No KL term.
double grpo_objective(std::span<const GroupTerms> groups, double epsilon);

// A rollout ready for an update: its sampled decisions plus the combined
// reward assigned by the reward pipeline.
struct ScoredRollout {
  DecisionSequence decisions;
  double reward = 0.0;
};

struct ScoredGroup {
  std::vector<ScoredRollout> rollouts;
};

struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> gradient;
};

// Objective value and its parameter gradient at the policy's current
// parameters, with advantages normalized per group. Groups are evaluated into
// per-group buffers and reduced in group order, so the parallel path matches
// the serial reference bitwise.
ObjectiveEval eval_objective(const PolicyInterface& policy,
                             std::span<const ScoredGroup> batch, const ClipConfig& config,
                             Execution exec = Execution::Parallel);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct UpdateResult {
  std::vector<double> parameters;  // post-step
  double objective = 0.0;          // pre-step value
};

// One ascent step on the clipped objective. Throws DivergedError on a
// non-finite gradient without mutating the policy. Pass an AdamState to use
// the moment-based optimizer; plain ascent is the reference path.
UpdateResult update_policy(PolicyInterface& policy, std::span<const ScoredGroup> batch,
                           const ClipConfig& config, AdamState* adam = nullptr,
                           Execution exec = Execution::Parallel);

}  // namespace adactrl::grpo
