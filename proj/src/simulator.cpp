#include "adactrl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "adactrl/errors.hpp"
#include "adactrl/grid.hpp"

namespace adactrl::sim {

namespace {

// Stream purposes keep the batch-selection, rollout and evaluation draws on
// disjoint substreams of the run seed.
constexpr std::uint64_t kBatchStream = 0x8f14e45fceea167aULL;
constexpr std::uint64_t kRolloutStream = 0x3c6ef372fe94f82bULL;
constexpr std::uint64_t kEvalStream = 0xd1b54a32d192ed03ULL;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double log_sigmoid(double x) { return -softplus(-x); }         // log P(easy)
double log_one_minus_sigmoid(double x) { return -softplus(x); }  // log P(hard)

// Decision key layout (interpreted only by BudgetPolicy):
//   bit 63      kind: 0 = tag decision, 1 = budget-bin decision
//   bits 0..15  bucket
//   bit 32      conditioning/drawn tag is Easy
//   bits 40..55 bin index (bin decisions only)
constexpr std::uint64_t kKindBit = 1ULL << 63;
constexpr std::uint64_t kEasyBit = 1ULL << 32;
constexpr int kBinShift = 40;

std::uint64_t tag_key(int bucket, DifficultyTag tag) {
  std::uint64_t key = static_cast<std::uint64_t>(bucket);
  if (tag == DifficultyTag::Easy) key |= kEasyBit;
  return key;
}

std::uint64_t bin_key(int bucket, DifficultyTag tag, int bin) {
  return tag_key(bucket, tag) | kKindBit | (static_cast<std::uint64_t>(bin) << kBinShift);
}

struct DecodedKey {
  bool is_bin = false;
  int bucket = 0;
  DifficultyTag tag = DifficultyTag::Hard;
  int bin = 0;
};

DecodedKey decode_key(std::uint64_t key) {
  DecodedKey d;
  d.is_bin = (key & kKindBit) != 0;
  d.bucket = static_cast<int>(key & 0xffffULL);
  d.tag = (key & kEasyBit) ? DifficultyTag::Easy : DifficultyTag::Hard;
  d.bin = static_cast<int>((key >> kBinShift) & 0xffffULL);
  return d;
}

double logsumexp(std::span<const double> xs) {
  double m = xs[0];
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

int bucket_for_difficulty(double difficulty, int buckets) {
  if (buckets < 1) throw std::invalid_argument("bucket_for_difficulty: buckets must be >= 1");
  if (!(difficulty >= 0.0 && difficulty <= 1.0)) {
    throw std::invalid_argument("bucket_for_difficulty: difficulty outside [0,1]");
  }
  const int b = static_cast<int>(std::floor(difficulty * buckets));
  return std::clamp(b, 0, buckets - 1);
}

double difficulty_from_level(int level) {
  if (level < 1 || level > 9) throw std::invalid_argument("difficulty level outside [1,9]");
  return (level - 1) / 8.0;
}

int level_from_difficulty(double difficulty) {
  if (!(difficulty >= 0.0 && difficulty <= 1.0)) {
    throw std::invalid_argument("difficulty outside [0,1]");
  }
  return 1 + static_cast<int>(std::llround(difficulty * 8.0));
}

double SuccessModel::probability(double budget, double difficulty) const {
  const double tau = tau_min + difficulty * (tau_max - tau_min);
  return sigmoid((budget - tau) / width);
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Adaptive: return "adaptive";
    case Mode::ForceEasy: return "force_easy";
    case Mode::ForceHard: return "force_hard";
  }
  throw std::invalid_argument("unknown mode");
}

BudgetPolicy::BudgetPolicy(int buckets, int bins, double bin_lo, double bin_hi)
    : buckets_(buckets), bins_(bins), bin_lo_(bin_lo), bin_hi_(bin_hi) {
  if (buckets < 1) throw std::invalid_argument("BudgetPolicy: buckets must be >= 1");
  if (bins < 1) throw std::invalid_argument("BudgetPolicy: bins must be >= 1");
  centers_ = geometric_centers(log_spaced_edges(bin_lo, bin_hi, bins));
  params_.assign(static_cast<std::size_t>(buckets) +
                     static_cast<std::size_t>(buckets) * 2 * static_cast<std::size_t>(bins),
                 0.0);
}

BudgetPolicy BudgetPolicy::from_easy_fractions(const std::vector<double>& easy_fractions,
                                               int bins, double bin_lo, double bin_hi) {
  BudgetPolicy policy(static_cast<int>(easy_fractions.size()), bins, bin_lo, bin_hi);
  constexpr double kEps = 1e-3;  // keeps the seeded logits finite
  for (std::size_t b = 0; b < easy_fractions.size(); ++b) {
    const double f = std::clamp(easy_fractions[b], kEps, 1.0 - kEps);
    policy.params_[b] = std::log(f / (1.0 - f));
  }
  return policy;
}

std::size_t BudgetPolicy::budget_offset(int bucket, DifficultyTag tag) const {
  const int tag_index = tag == DifficultyTag::Easy ? 1 : 0;
  return static_cast<std::size_t>(buckets_) +
         (static_cast<std::size_t>(bucket) * 2 + static_cast<std::size_t>(tag_index)) *
             static_cast<std::size_t>(bins_);
}

double BudgetPolicy::tag_logit(int bucket) const {
  if (bucket < 0 || bucket >= buckets_) throw std::invalid_argument("bucket out of range");
  return params_[static_cast<std::size_t>(bucket)];
}

double BudgetPolicy::easy_probability(int bucket) const { return sigmoid(tag_logit(bucket)); }

std::vector<double> BudgetPolicy::bin_probabilities(int bucket, DifficultyTag tag) const {
  if (bucket < 0 || bucket >= buckets_) throw std::invalid_argument("bucket out of range");
  const std::size_t off = budget_offset(bucket, tag);
  std::span<const double> row(params_.data() + off, static_cast<std::size_t>(bins_));
  const double lse = logsumexp(row);
  std::vector<double> probs(static_cast<std::size_t>(bins_));
  for (int k = 0; k < bins_; ++k) probs[static_cast<std::size_t>(k)] = std::exp(row[k] - lse);
  return probs;
}

double BudgetPolicy::expected_budget(int bucket, DifficultyTag tag) const {
  const auto probs = bin_probabilities(bucket, tag);
  double mean = 0.0;
  for (int k = 0; k < bins_; ++k) {
    mean += probs[static_cast<std::size_t>(k)] * centers_[static_cast<std::size_t>(k)];
  }
  return mean;
}

std::size_t BudgetPolicy::parameter_count() const { return params_.size(); }

std::vector<double> BudgetPolicy::parameters() const { return params_; }

void BudgetPolicy::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("BudgetPolicy: parameter size mismatch");
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw std::invalid_argument("BudgetPolicy: non-finite parameter");
  }
  params_.assign(params.begin(), params.end());
}

double BudgetPolicy::decision_log_prob(const grpo::Decision& decision) const {
  const DecodedKey d = decode_key(decision.key);
  if (d.bucket < 0 || d.bucket >= buckets_) throw std::invalid_argument("bucket out of range");
  if (!d.is_bin) {
    const double logit = params_[static_cast<std::size_t>(d.bucket)];
    return d.tag == DifficultyTag::Easy ? log_sigmoid(logit) : log_one_minus_sigmoid(logit);
  }
  if (d.bin < 0 || d.bin >= bins_) throw std::invalid_argument("bin out of range");
  const std::size_t off = budget_offset(d.bucket, d.tag);
  std::span<const double> row(params_.data() + off, static_cast<std::size_t>(bins_));
  return row[static_cast<std::size_t>(d.bin)] - logsumexp(row);
}

void BudgetPolicy::add_log_prob_gradient(const grpo::Decision& decision, double weight,
                                         std::span<double> grad) const {
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("BudgetPolicy: gradient size mismatch");
  }
  const DecodedKey d = decode_key(decision.key);
  if (d.bucket < 0 || d.bucket >= buckets_) throw std::invalid_argument("bucket out of range");
  if (!d.is_bin) {
    const double s = sigmoid(params_[static_cast<std::size_t>(d.bucket)]);
    const double dlogit = d.tag == DifficultyTag::Easy ? 1.0 - s : -s;
    grad[static_cast<std::size_t>(d.bucket)] += weight * dlogit;
    return;
  }
  if (d.bin < 0 || d.bin >= bins_) throw std::invalid_argument("bin out of range");
  const std::size_t off = budget_offset(d.bucket, d.tag);
  std::span<const double> row(params_.data() + off, static_cast<std::size_t>(bins_));
  const double lse = logsumexp(row);
  for (int k = 0; k < bins_; ++k) {
    const double soft = std::exp(row[k] - lse);
    const double indicator = k == d.bin ? 1.0 : 0.0;
    grad[off + static_cast<std::size_t>(k)] += weight * (indicator - soft);
  }
}

grpo::Decision BudgetPolicy::tag_decision(int bucket, DifficultyTag tag, bool forced) const {
  grpo::Decision decision;
  decision.key = tag_key(bucket, tag);
  decision.forced = forced;
  decision.log_prob = forced ? 0.0 : decision_log_prob(decision);
  return decision;
}

grpo::Decision BudgetPolicy::bin_decision(int bucket, DifficultyTag tag, int bin) const {
  grpo::Decision decision;
  decision.key = bin_key(bucket, tag, bin);
  decision.forced = false;
  decision.log_prob = decision_log_prob(decision);
  return decision;
}

SimulatedRollout sample_rollout(const BudgetPolicy& policy, const SyntheticTask& task,
                                Mode mode, const SuccessModel& success, Rng& rng) {
  SimulatedRollout out;
  out.bucket = task.bucket;
  out.difficulty = task.difficulty;

  DifficultyTag tag;
  if (mode == Mode::Adaptive) {
    tag = rng.bernoulli(policy.easy_probability(task.bucket)) ? DifficultyTag::Easy
                                                              : DifficultyTag::Hard;
    out.decisions.push_back(policy.tag_decision(task.bucket, tag, false));
  } else {
    tag = mode == Mode::ForceEasy ? DifficultyTag::Easy : DifficultyTag::Hard;
    out.decisions.push_back(policy.tag_decision(task.bucket, tag, true));
  }

  const auto probs = policy.bin_probabilities(task.bucket, tag);
  const int bin = rng.categorical(probs);
  out.decisions.push_back(policy.bin_decision(task.bucket, tag, bin));

  const double budget = policy.bin_centers()[static_cast<std::size_t>(bin)];
  out.record.problem_id = task.id;
  out.record.tag = tag;
  out.record.length = static_cast<std::uint64_t>(std::llround(budget));
  out.record.correct = rng.bernoulli(success.probability(budget, task.difficulty));
  return out;
}

namespace {

void validate_tasks(const std::vector<SyntheticTask>& tasks, int buckets) {
  if (tasks.empty()) throw std::invalid_argument("no tasks");
  for (const auto& t : tasks) {
    if (t.bucket < 0 || t.bucket >= buckets) {
      throw std::invalid_argument("task bucket out of range");
    }
    if (!(t.difficulty >= 0.0 && t.difficulty <= 1.0)) {
      throw std::invalid_argument("task difficulty outside [0,1]");
    }
  }
}

BudgetPolicy make_initial_policy(const SimulatorConfig& cfg) {
  if (cfg.cold_start_easy_fractions) {
    if (static_cast<int>(cfg.cold_start_easy_fractions->size()) != cfg.buckets) {
      throw std::invalid_argument("cold-start fractions must cover every bucket");
    }
    return BudgetPolicy::from_easy_fractions(*cfg.cold_start_easy_fractions, cfg.bins,
                                             cfg.bin_lo, cfg.bin_hi);
  }
  return BudgetPolicy(cfg.buckets, cfg.bins, cfg.bin_lo, cfg.bin_hi);
}

StepRecord summarize_step(int step, double objective,
                          const std::vector<SimulatedRollout>& rollouts,
                          const std::vector<std::vector<rewards::RewardBreakdown>>& scored,
                          int buckets) {
  StepRecord rec;
  rec.step = step;
  rec.objective = objective;
  rec.buckets.assign(static_cast<std::size_t>(buckets), BucketStats{});

  std::vector<double> budget_sum(static_cast<std::size_t>(buckets), 0.0);
  std::vector<std::uint64_t> easy_count(static_cast<std::size_t>(buckets), 0);
  std::vector<std::uint64_t> correct_count(static_cast<std::size_t>(buckets), 0);

  double reward_sum = 0.0;
  std::uint64_t correct_total = 0;
  double budget_total = 0.0;
  for (const auto& group : scored) {
    for (const auto& b : group) reward_sum += b.combined;
  }
  for (const auto& r : rollouts) {
    const auto b = static_cast<std::size_t>(r.bucket);
    rec.buckets[b].count += 1;
    budget_sum[b] += static_cast<double>(r.record.length);
    if (r.record.tag == DifficultyTag::Easy) easy_count[b] += 1;
    if (r.record.correct) {
      correct_count[b] += 1;
      correct_total += 1;
    }
    budget_total += static_cast<double>(r.record.length);
  }

  const double n = static_cast<double>(rollouts.size());
  rec.mean_reward = reward_sum / n;
  rec.accuracy = static_cast<double>(correct_total) / n;
  rec.mean_budget = budget_total / n;
  for (int b = 0; b < buckets; ++b) {
    auto& s = rec.buckets[static_cast<std::size_t>(b)];
    if (s.count == 0) continue;
    const double c = static_cast<double>(s.count);
    s.easy_proportion = static_cast<double>(easy_count[static_cast<std::size_t>(b)]) / c;
    s.mean_budget = budget_sum[static_cast<std::size_t>(b)] / c;
    s.accuracy = static_cast<double>(correct_count[static_cast<std::size_t>(b)]) / c;
  }
  return rec;
}

}  // namespace

TrainResult run_training(const std::vector<SyntheticTask>& tasks,
                         const rewards::RewardConfig& reward_cfg,
                         const grpo::ClipConfig& clip_cfg, const SimulatorConfig& sim_cfg,
                         int steps, std::uint64_t seed, Execution exec) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (sim_cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (reward_cfg.group_size < 2) throw std::invalid_argument("group_size must be >= 2");
  validate_tasks(tasks, sim_cfg.buckets);
  {
    std::set<int> distinct;
    for (const auto& t : tasks) distinct.insert(t.bucket);
    if (distinct.size() < 2) {
      throw std::invalid_argument("tasks must cover at least 2 distinct buckets");
    }
  }

  TrainResult result{make_initial_policy(sim_cfg), {}, {}, {}};
  grpo::AdamState adam;

  const int batch = sim_cfg.batch_size;
  const int group_size = reward_cfg.group_size;
  const std::size_t total =
      static_cast<std::size_t>(batch) * static_cast<std::size_t>(group_size);

  for (int step = 0; step < steps; ++step) {
    // Batch selection: uniform over tasks, with replacement.
    std::vector<std::size_t> slots(static_cast<std::size_t>(batch));
    {
      Rng pick(derive_stream(seed ^ kBatchStream, static_cast<std::uint64_t>(step)));
      for (auto& s : slots) s = static_cast<std::size_t>(pick.next_u64() % tasks.size());
    }

    // Rollouts: one independent stream per (step, slot, rollout).
    std::vector<SimulatedRollout> rollouts(total);
    for_each_index(total, exec, [&](std::size_t i) {
      const std::size_t slot = i / static_cast<std::size_t>(group_size);
      const std::size_t r = i % static_cast<std::size_t>(group_size);
      Rng rng(derive_stream(seed ^ kRolloutStream, static_cast<std::uint64_t>(step), slot, r));
      rollouts[i] = sample_rollout(result.policy, tasks[slots[slot]], Mode::Adaptive,
                                   sim_cfg.success, rng);
    });

    std::vector<std::vector<rewards::RolloutRecord>> groups(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      auto& g = groups[static_cast<std::size_t>(b)];
      g.reserve(static_cast<std::size_t>(group_size));
      for (int r = 0; r < group_size; ++r) {
        g.push_back(rollouts[static_cast<std::size_t>(b) * group_size + r].record);
      }
    }
    const auto scored = rewards::score_groups(groups, reward_cfg, exec);

    std::vector<grpo::ScoredGroup> update_batch(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      auto& g = update_batch[static_cast<std::size_t>(b)];
      g.rollouts.resize(static_cast<std::size_t>(group_size));
      for (int r = 0; r < group_size; ++r) {
        const auto idx = static_cast<std::size_t>(b) * group_size + r;
        g.rollouts[static_cast<std::size_t>(r)] = {rollouts[idx].decisions,
                                                   scored[static_cast<std::size_t>(b)]
                                                         [static_cast<std::size_t>(r)]
                                                             .combined};
      }
    }

    grpo::UpdateResult update;
    try {
      update = grpo::update_policy(result.policy, update_batch, clip_cfg,
                                   clip_cfg.optimizer == grpo::Optimizer::Adam ? &adam
                                                                               : nullptr,
                                   exec);
    } catch (const DivergedError&) {
      throw DivergedError("diverged at step " + std::to_string(step));
    }

    result.history.steps.push_back(
        summarize_step(step, update.objective, rollouts, scored, sim_cfg.buckets));

    StepDump dump;
    dump.groups.resize(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      auto& g = dump.groups[static_cast<std::size_t>(b)];
      g.assign(rollouts.begin() + static_cast<std::ptrdiff_t>(b) * group_size,
               rollouts.begin() + static_cast<std::ptrdiff_t>(b + 1) * group_size);
    }
    dump.breakdowns = scored;
    if (sim_cfg.record_rollouts) result.dumps.push_back(dump);
    if (step == steps - 1) result.last_step = std::move(dump);
  }

  return result;
}

std::vector<ModeEvaluation> evaluate_modes(const BudgetPolicy& policy,
                                           const std::vector<SyntheticTask>& tasks,
                                           const rewards::RewardConfig& reward_cfg,
                                           const SimulatorConfig& sim_cfg,
                                           int samples_per_task, std::uint64_t seed,
                                           Execution exec) {
  if (samples_per_task < 1) throw std::invalid_argument("samples_per_task must be >= 1");
  validate_tasks(tasks, sim_cfg.buckets);

  const Mode modes[] = {Mode::Adaptive, Mode::ForceEasy, Mode::ForceHard};
  std::vector<ModeEvaluation> evals;
  evals.reserve(3);

  for (std::size_t mi = 0; mi < 3; ++mi) {
    ModeEvaluation ev;
    ev.mode = modes[mi];
    const std::size_t total = tasks.size() * static_cast<std::size_t>(samples_per_task);
    ev.rollouts.resize(total);
    for_each_index(total, exec, [&](std::size_t i) {
      const std::size_t t = i / static_cast<std::size_t>(samples_per_task);
      const std::size_t r = i % static_cast<std::size_t>(samples_per_task);
      Rng rng(derive_stream(seed ^ kEvalStream, mi, t, r));
      ev.rollouts[i] = sample_rollout(policy, tasks[t], modes[mi], sim_cfg.success, rng);
    });

    ev.buckets.assign(static_cast<std::size_t>(sim_cfg.buckets), ModeBucketSummary{});
    std::vector<double> length_sum(static_cast<std::size_t>(sim_cfg.buckets), 0.0);
    std::vector<std::uint64_t> correct(static_cast<std::size_t>(sim_cfg.buckets), 0);
    double total_length = 0.0;
    std::uint64_t total_correct = 0;
    for (const auto& r : ev.rollouts) {
      const auto b = static_cast<std::size_t>(r.bucket);
      ev.buckets[b].count += 1;
      length_sum[b] += static_cast<double>(r.record.length);
      if (r.record.correct) correct[b] += 1;
      total_length += static_cast<double>(r.record.length);
      if (r.record.correct) total_correct += 1;
    }
    ev.accuracy = static_cast<double>(total_correct) / static_cast<double>(total);
    ev.mean_length = total_length / static_cast<double>(total);
    for (int b = 0; b < sim_cfg.buckets; ++b) {
      auto& s = ev.buckets[static_cast<std::size_t>(b)];
      if (s.count == 0) continue;
      s.accuracy = static_cast<double>(correct[static_cast<std::size_t>(b)]) /
                   static_cast<double>(s.count);
      s.mean_length = length_sum[static_cast<std::size_t>(b)] / static_cast<double>(s.count);
    }

    if (samples_per_task >= 2) {
      std::vector<std::vector<rewards::RolloutRecord>> groups(tasks.size());
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        auto& g = groups[t];
        g.reserve(static_cast<std::size_t>(samples_per_task));
        for (int r = 0; r < samples_per_task; ++r) {
          g.push_back(
              ev.rollouts[t * static_cast<std::size_t>(samples_per_task) + r].record);
        }
      }
      const auto scored = rewards::score_groups(groups, reward_cfg, exec);
      double sum = 0.0;
      for (const auto& g : scored) {
        for (const auto& b : g) sum += b.combined;
      }
      ev.mean_reward = sum / static_cast<double>(total);
    }

    evals.push_back(std::move(ev));
  }
  return evals;
}

std::vector<SyntheticTask> make_mixed_tasks(const std::vector<double>& difficulties,
                                            int per_difficulty, int buckets) {
  if (difficulties.empty()) throw std::invalid_argument("no difficulties");
  if (per_difficulty < 1) throw std::invalid_argument("per_difficulty must be >= 1");
  std::vector<SyntheticTask> tasks;
  tasks.reserve(difficulties.size() * static_cast<std::size_t>(per_difficulty));
  std::size_t index = 0;
  for (int rep = 0; rep < per_difficulty; ++rep) {
    for (double d : difficulties) {
      SyntheticTask t;
      t.id = "task-" + std::to_string(index++);
      t.difficulty = d;
      t.bucket = bucket_for_difficulty(d, buckets);
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

std::vector<double> easy_tag_fractions(
    const std::vector<std::pair<double, DifficultyTag>>& difficulty_tag_pairs, int buckets) {
  std::vector<std::uint64_t> total(static_cast<std::size_t>(buckets), 0);
  std::vector<std::uint64_t> easy(static_cast<std::size_t>(buckets), 0);
  for (const auto& [difficulty, tag] : difficulty_tag_pairs) {
    const auto b = static_cast<std::size_t>(bucket_for_difficulty(difficulty, buckets));
    total[b] += 1;
    if (tag == DifficultyTag::Easy) easy[b] += 1;
  }
  std::vector<double> fractions(static_cast<std::size_t>(buckets), 0.5);
  for (int b = 0; b < buckets; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    if (total[bi] > 0) {
      fractions[bi] = static_cast<double>(easy[bi]) / static_cast<double>(total[bi]);
    }
  }
  return fractions;
}

std::vector<TidyRow> history_plot_rows(const TrainHistory& history) {
  std::vector<TidyRow> rows;
  for (const auto& rec : history.steps) {
    const std::string x = std::to_string(rec.step);
    rows.push_back({x, "mean_reward", rec.mean_reward});
    rows.push_back({x, "accuracy", rec.accuracy});
    rows.push_back({x, "mean_budget", rec.mean_budget});
    rows.push_back({x, "objective", rec.objective});
    for (std::size_t b = 0; b < rec.buckets.size(); ++b) {
      const auto& s = rec.buckets[b];
      if (s.count == 0) continue;
      const std::string prefix = "bucket" + std::to_string(b) + "/";
      rows.push_back({x, prefix + "easy_proportion", s.easy_proportion});
      rows.push_back({x, prefix + "mean_budget", s.mean_budget});
      rows.push_back({x, prefix + "accuracy", s.accuracy});
    }
  }
  return rows;
}

}  // namespace adactrl::sim
