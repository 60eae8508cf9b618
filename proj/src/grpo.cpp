#include "adactrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adactrl/errors.hpp"

namespace adactrl::grpo {

double PolicyInterface::log_prob(const DecisionSequence& seq) const {
  double total = 0.0;
  for (const Decision& d : seq) {
    if (d.forced) continue;
    total += decision_log_prob(d);
  }
  return total;
}

std::vector<double> PolicyInterface::log_prob_gradient(const DecisionSequence& seq) const {
  std::vector<double> grad(parameter_count(), 0.0);
  for (const Decision& d : seq) {
    if (d.forced) continue;
    add_log_prob_gradient(d, 1.0, grad);
  }
  return grad;
}

GroupAdvantages normalize_advantages(std::span<const double> rewards, double std_floor) {
  if (rewards.size() < 2) throw std::invalid_argument("degenerate group");

  const double n = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  const double mean = sum / n;

  bool constant = true;
  for (double r : rewards) {
    if (r != rewards[0]) {
      constant = false;
      break;
    }
  }
  GroupAdvantages adv;
  adv.values.assign(rewards.size(), 0.0);
  if (constant) return adv;  // deviations are exactly zero before division

  double sq = 0.0;
  for (double r : rewards) {
    const double d = r - mean;
    sq += d * d;
  }
  const double std = std::sqrt(sq / n);  // population, no Bessel correction
  const double denom = std::max(std, std_floor);
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    adv.values[i] = (rewards[i] - mean) / denom;
  }
  return adv;
}

double clipped_term(double ratio, double advantage, double epsilon) {
  if (!(ratio > 0.0)) throw std::invalid_argument("invalid probability ratio");
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double grpo_objective(std::span<const GroupTerms> groups, double epsilon) {
  if (groups.empty()) throw std::invalid_argument("empty batch");
  double total = 0.0;
  for (const GroupTerms& group : groups) {
    if (group.empty()) throw std::invalid_argument("empty group");
    double group_sum = 0.0;
    for (const RolloutTerms& rollout : group) {
      if (rollout.old_log_probs.size() != rollout.new_log_probs.size()) {
        throw std::invalid_argument("mismatched log-prob sequence lengths");
      }
      if (rollout.old_log_probs.empty()) {
        throw std::invalid_argument("empty decision sequence");
      }
      double rollout_sum = 0.0;
      for (std::size_t t = 0; t < rollout.old_log_probs.size(); ++t) {
        const double ratio = std::exp(rollout.new_log_probs[t] - rollout.old_log_probs[t]);
        rollout_sum += clipped_term(ratio, rollout.advantage, epsilon);
      }
      group_sum += rollout_sum / static_cast<double>(rollout.old_log_probs.size());
    }
    total += group_sum / static_cast<double>(group.size());
  }
  return total / static_cast<double>(groups.size());
}

namespace {

struct GroupEval {
  double objective = 0.0;
  std::vector<double> gradient;
};

// Objective and gradient contribution of one group, already carrying the
// 1/(B*G*|o_i|) weights. The min picks the unclipped branch on ties, so the
// subgradient at a tie is ratio * A * dlogpi.
GroupEval eval_group(const PolicyInterface& policy, const ScoredGroup& group,
                     const ClipConfig& config, double inv_batch) {
  if (group.rollouts.empty()) throw std::invalid_argument("empty group");

  std::vector<double> rewards(group.rollouts.size());
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    rewards[i] = group.rollouts[i].reward;
  }
  const GroupAdvantages adv = normalize_advantages(rewards, config.std_floor);

  GroupEval eval;
  eval.gradient.assign(policy.parameter_count(), 0.0);
  const double inv_group = 1.0 / static_cast<double>(group.rollouts.size());

  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const ScoredRollout& rollout = group.rollouts[i];
    std::size_t policy_decisions = 0;
    for (const Decision& d : rollout.decisions) {
      if (!d.forced) ++policy_decisions;
    }
    if (policy_decisions == 0) throw std::invalid_argument("empty decision sequence");
    const double weight =
        inv_batch * inv_group / static_cast<double>(policy_decisions);
    const double a = adv.values[i];

    for (const Decision& d : rollout.decisions) {
      if (d.forced) continue;
      const double new_lp = policy.decision_log_prob(d);
      const double ratio = std::exp(new_lp - d.log_prob);
      const double unclipped = ratio * a;
      const double clipped =
          std::clamp(ratio, 1.0 - config.epsilon, 1.0 + config.epsilon) * a;
      eval.objective += weight * std::min(unclipped, clipped);
      if (unclipped <= clipped) {
        policy.add_log_prob_gradient(d, weight * ratio * a, eval.gradient);
      }
    }
  }
  return eval;
}

}  // namespace

ObjectiveEval eval_objective(const PolicyInterface& policy,
                             std::span<const ScoredGroup> batch, const ClipConfig& config,
                             Execution exec) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  std::vector<GroupEval> per_group(batch.size());
  for_each_index(batch.size(), exec, [&](std::size_t g) {
    per_group[g] = eval_group(policy, batch[g], config, inv_batch);
  });

  // Reduce in group order regardless of thread count.
  ObjectiveEval out;
  out.gradient.assign(policy.parameter_count(), 0.0);
  for (const GroupEval& ge : per_group) {
    out.value += ge.objective;
    for (std::size_t p = 0; p < out.gradient.size(); ++p) {
      out.gradient[p] += ge.gradient[p];
    }
  }
  return out;
}

UpdateResult update_policy(PolicyInterface& policy, std::span<const ScoredGroup> batch,
                           const ClipConfig& config, AdamState* adam, Execution exec) {
  const ObjectiveEval eval = eval_objective(policy, batch, config, exec);
  for (double g : eval.gradient) {
    if (!std::isfinite(g)) throw DivergedError("diverged");
  }
  if (!std::isfinite(eval.value)) throw DivergedError("diverged");

  std::vector<double> params = policy.parameters();
  if (config.optimizer == Optimizer::Adam && adam != nullptr) {
    if (adam->m.size() != params.size()) {
      adam->m.assign(params.size(), 0.0);
      adam->v.assign(params.size(), 0.0);
      adam->step = 0;
    }
    adam->step += 1;
    const double bc1 = 1.0 - std::pow(adam->beta1, static_cast<double>(adam->step));
    const double bc2 = 1.0 - std::pow(adam->beta2, static_cast<double>(adam->step));
    for (std::size_t p = 0; p < params.size(); ++p) {
      adam->m[p] = adam->beta1 * adam->m[p] + (1.0 - adam->beta1) * eval.gradient[p];
      adam->v[p] =
          adam->beta2 * adam->v[p] + (1.0 - adam->beta2) * eval.gradient[p] * eval.gradient[p];
      const double mhat = adam->m[p] / bc1;
      const double vhat = adam->v[p] / bc2;
      params[p] += config.learning_rate * mhat / (std::sqrt(vhat) + adam->eps);
    }
  } else {
    for (std::size_t p = 0; p < params.size(); ++p) {
      params[p] += config.learning_rate * eval.gradient[p];
    }
  }
  policy.set_parameters(params);
  return UpdateResult{std::move(params), eval.value};
}

}  // namespace adactrl::grpo
