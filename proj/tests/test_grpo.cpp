#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "adactrl/errors.hpp"
#include "adactrl/grpo.hpp"
#include "adactrl/rng.hpp"
#include "oracles.hpp"

namespace grpo = adactrl::grpo;
using adactrl::Execution;
using adactrl::Rng;

namespace {

double logsumexp(const std::vector<double>& v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Softmax policy over N actions; decision key = action index.
class SoftmaxToy final : public grpo::PolicyInterface {
 public:
  explicit SoftmaxToy(std::vector<double> theta) : theta_(std::move(theta)) {}

  std::size_t parameter_count() const override { return theta_.size(); }
  std::vector<double> parameters() const override { return theta_; }
  void set_parameters(std::span<const double> params) override {
    theta_.assign(params.begin(), params.end());
  }

  double decision_log_prob(const grpo::Decision& d) const override {
    return theta_[d.key] - logsumexp(theta_);
  }

  void add_log_prob_gradient(const grpo::Decision& d, double weight,
                             std::span<double> grad) const override {
    const double lse = logsumexp(theta_);
    for (std::size_t j = 0; j < theta_.size(); ++j) {
      const double softmax_j = std::exp(theta_[j] - lse);
      grad[j] += weight * ((j == d.key ? 1.0 : 0.0) - softmax_j);
    }
  }

 private:
  std::vector<double> theta_;
};

// Bernoulli policy with one logit: P(key=1) = sigmoid(theta).
class BernoulliToy final : public grpo::PolicyInterface {
 public:
  explicit BernoulliToy(double theta) : theta_(theta) {}

  std::size_t parameter_count() const override { return 1; }
  std::vector<double> parameters() const override { return {theta_}; }
  void set_parameters(std::span<const double> params) override { theta_ = params[0]; }

  double decision_log_prob(const grpo::Decision& d) const override {
    const double p = 1.0 / (1.0 + std::exp(-theta_));
    return d.key == 1 ? std::log(p) : std::log(1.0 - p);
  }

  void add_log_prob_gradient(const grpo::Decision& d, double weight,
                             std::span<double> grad) const override {
    const double p = 1.0 / (1.0 + std::exp(-theta_));
    grad[0] += weight * (d.key == 1 ? 1.0 - p : -p);
  }

  double theta() const { return theta_; }

 private:
  double theta_;
};

// Gradient sink that always produces a non-finite component.
class PoisonPolicy final : public grpo::PolicyInterface {
 public:
  std::size_t parameter_count() const override { return 1; }
  std::vector<double> parameters() const override { return {0.25}; }
  void set_parameters(std::span<const double>) override { mutated = true; }
  double decision_log_prob(const grpo::Decision&) const override { return -0.5; }
  void add_log_prob_gradient(const grpo::Decision&, double weight,
                             std::span<double> grad) const override {
    grad[0] += weight * std::numeric_limits<double>::quiet_NaN();
  }
  mutable bool mutated = false;
};

}  // namespace

TEST_CASE("normalize_advantages pinned examples") {
  const std::vector<double> pm = {1.0, -1.0};
  const auto a = grpo::normalize_advantages(pm, 1e-6);
  CHECK(a.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.values[1] == doctest::Approx(-1.0).epsilon(1e-12));

  const std::vector<double> constant = {3.3, 3.3, 3.3};
  const auto z = grpo::normalize_advantages(constant, 1e-6);
  CHECK(z.values == std::vector<double>{0.0, 0.0, 0.0});  // exact zeros

  const std::vector<double> three = {2.0, 0.0, 1.0};
  const auto n3 = grpo::normalize_advantages(three, 1e-6);
  CHECK(n3.values[0] == doctest::Approx(1.22474).epsilon(1e-4));
  CHECK(n3.values[1] == doctest::Approx(-1.22474).epsilon(1e-4));
  CHECK(n3.values[2] == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_WITH_AS(grpo::normalize_advantages(std::vector<double>{1.0}, 1e-6),
                       "degenerate group", std::invalid_argument);
}

TEST_CASE("normalize_advantages invariants over random groups") {
  Rng rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 15);
    std::vector<double> rewards(static_cast<std::size_t>(n));
    for (auto& r : rewards) r = rng.uniform01() * 4.0 - 2.0;
    rewards[0] += 1e-3;  // ensure non-constant

    const auto base = grpo::normalize_advantages(rewards, 1e-6).values;
    double mean = 0.0, var = 0.0;
    for (double v : base) mean += v;
    mean /= static_cast<double>(n);
    for (double v : base) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-9));

    // Agreement with the direct transcription.
    const auto want = oracles::normalize(rewards, 1e-6);
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::abs(base[i] - want[i]) <= 1e-12);
    }

    // Shift invariance.
    const double shift = rng.uniform01() * 10.0 - 5.0;
    std::vector<double> shifted = rewards;
    for (auto& r : shifted) r += shift;
    const auto sh = grpo::normalize_advantages(shifted, 1e-6).values;
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::abs(sh[i] - base[i]) < 1e-9);
    }

    // Positive-scale invariance.
    const double scale = 0.1 + rng.uniform01() * 5.0;
    std::vector<double> scaled = rewards;
    for (auto& r : scaled) r *= scale;
    const auto sc = grpo::normalize_advantages(scaled, 1e-6).values;
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::abs(sc[i] - base[i]) < 1e-8);
    }
  }
}

TEST_CASE("clipped_term pinned examples and bound") {
  CHECK(grpo::clipped_term(1.0, 1.0, 0.2) == 1.0);
  CHECK(grpo::clipped_term(2.0, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(grpo::clipped_term(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  CHECK_THROWS_WITH_AS(grpo::clipped_term(0.0, 1.0, 0.2), "invalid probability ratio",
                       std::invalid_argument);
  CHECK_THROWS_AS(grpo::clipped_term(-0.5, 1.0, 0.2), std::invalid_argument);

  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    const double ratio = 0.01 + rng.uniform01() * 4.0;
    const double adv = rng.uniform01() * 6.0 - 3.0;
    const double eps = 0.05 + rng.uniform01() * 0.5;
    const double got = grpo::clipped_term(ratio, adv, eps);
    CHECK(got == doctest::Approx(oracles::clipped(ratio, adv, eps)).epsilon(1e-12));
    CHECK(std::abs(got) <= std::max(std::abs(adv) * (1.0 + eps), std::abs(adv) * ratio) +
                               1e-12);
    if (adv > 0.0) CHECK(got <= ratio * adv + 1e-12);
  }
}

TEST_CASE("grpo_objective pinned examples") {
  // One group, one rollout, one decision, on-policy, A = 1 -> 1.0.
  grpo::GroupTerms g1 = {{{-0.7}, {-0.7}, 1.0}};
  std::vector<grpo::GroupTerms> batch1 = {g1};
  CHECK(grpo::grpo_objective(batch1, 0.2) == doctest::Approx(1.0));

  // Ratios (2.0, 1.0) with A = 1, eps = 0.2 -> (1.2 + 1.0) / 2.
  grpo::GroupTerms g2 = {{{std::log(1.0), std::log(2.0)},
                          {std::log(2.0), std::log(2.0)},
                          1.0}};
  std::vector<grpo::GroupTerms> batch2 = {g2};
  CHECK(grpo::grpo_objective(batch2, 0.2) == doctest::Approx(1.1));

  // All-zero advantages -> 0.
  grpo::GroupTerms g3 = {{{-0.7, -0.2}, {-0.6, -0.4}, 0.0}};
  std::vector<grpo::GroupTerms> batch3 = {g3};
  CHECK(grpo::grpo_objective(batch3, 0.2) == 0.0);

  grpo::GroupTerms bad = {{{-0.7, -0.2}, {-0.6}, 1.0}};
  std::vector<grpo::GroupTerms> batch_bad = {bad};
  CHECK_THROWS_WITH_AS(grpo::grpo_objective(batch_bad, 0.2),
                       "mismatched log-prob sequence lengths", std::invalid_argument);
}

TEST_CASE("on-policy objective equals the advantage-weighted mean") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<grpo::GroupTerms> batch;
    double want = 0.0;
    const int groups = 1 + static_cast<int>(rng.next_u64() % 4);
    for (int g = 0; g < groups; ++g) {
      grpo::GroupTerms group;
      const int rollouts = 1 + static_cast<int>(rng.next_u64() % 5);
      double group_sum = 0.0;
      for (int i = 0; i < rollouts; ++i) {
        const int decisions = 1 + static_cast<int>(rng.next_u64() % 4);
        std::vector<double> lp(static_cast<std::size_t>(decisions));
        for (auto& x : lp) x = -3.0 * rng.uniform01();
        const double adv = rng.uniform01() * 2.0 - 1.0;
        group.push_back({lp, lp, adv});
        group_sum += adv;  // ratio == 1 everywhere, so each term is exactly adv
      }
      want += group_sum / rollouts;
      batch.push_back(std::move(group));
    }
    want /= groups;
    CHECK(grpo::grpo_objective(batch, 0.2) == doctest::Approx(want).epsilon(1e-12));
  }
}

namespace {

// Builds a random scored batch over an N-action softmax toy policy; decisions
// sampled from the policy at theta0, so old log-probs embed theta0.
std::vector<grpo::ScoredGroup> random_batch(const SoftmaxToy& policy, Rng& rng,
                                            int groups, int rollouts, int decisions) {
  std::vector<grpo::ScoredGroup> batch;
  const auto theta = policy.parameters();
  for (int g = 0; g < groups; ++g) {
    grpo::ScoredGroup group;
    for (int i = 0; i < rollouts; ++i) {
      grpo::ScoredRollout r;
      for (int d = 0; d < decisions; ++d) {
        grpo::Decision dec;
        dec.key = rng.next_u64() % theta.size();
        dec.log_prob = policy.decision_log_prob(dec);
        r.decisions.push_back(dec);
      }
      r.reward = rng.uniform01() * 2.0 - 1.0;
      group.rollouts.push_back(std::move(r));
    }
    batch.push_back(std::move(group));
  }
  return batch;
}

}  // namespace

TEST_CASE("analytic gradient matches central finite differences on a 5-parameter policy") {
  Rng rng(2024);
  grpo::ClipConfig cfg;
  cfg.epsilon = 0.2;
  int accepted = 0;
  int attempts = 0;
  while (accepted < 100 && attempts < 1000) {
    ++attempts;
    std::vector<double> theta0(5), theta(5);
    for (auto& t : theta0) t = rng.uniform01() * 2.0 - 1.0;
    // Evaluation point distinct from the sampling point so ratios spread on
    // both sides of the clip kinks; kink-adjacent configs are rejected below.
    for (std::size_t j = 0; j < 5; ++j) theta[j] = theta0[j] + 0.5 * (rng.uniform01() - 0.5);

    SoftmaxToy sampler(theta0);
    auto batch = random_batch(sampler, rng, 2, 3, 2);

    SoftmaxToy policy(theta);

    // Reject configurations with any ratio near a clip kink: the objective is
    // non-differentiable there and finite differences are meaningless.
    bool near_kink = false;
    for (const auto& group : batch) {
      std::vector<double> rewards;
      for (const auto& r : group.rollouts) rewards.push_back(r.reward);
      const auto adv = grpo::normalize_advantages(rewards, cfg.std_floor);
      for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
        for (const auto& dec : group.rollouts[i].decisions) {
          const double ratio = std::exp(policy.decision_log_prob(dec) - dec.log_prob);
          if (std::abs(ratio - (1.0 - cfg.epsilon)) < 1e-3 ||
              std::abs(ratio - (1.0 + cfg.epsilon)) < 1e-3 ||
              std::abs(adv.values[i]) < 1e-3) {
            near_kink = true;
          }
        }
      }
    }
    if (near_kink) continue;
    ++accepted;

    const auto eval = grpo::eval_objective(policy, batch, cfg, Execution::Serial);

    auto objective_at = [&](const std::vector<double>& params) {
      SoftmaxToy probe(params);
      return grpo::eval_objective(probe, batch, cfg, Execution::Serial).value;
    };
    for (std::size_t j = 0; j < 5; ++j) {
      const double fd = oracles::central_difference(objective_at, theta, j, 1e-6);
      const double scale = std::max({std::abs(fd), std::abs(eval.gradient[j]), 1e-8});
      CAPTURE(attempts);
      CAPTURE(j);
      CHECK(std::abs(eval.gradient[j] - fd) / scale <= 1e-4);
    }
  }
  CHECK(accepted == 100);
}

TEST_CASE("eval_objective parallel path is bitwise identical to serial") {
  Rng rng(31337);
  std::vector<double> theta0(5);
  for (auto& t : theta0) t = rng.uniform01();
  SoftmaxToy policy(theta0);
  const auto batch = random_batch(policy, rng, 16, 8, 3);
  grpo::ClipConfig cfg;
  const auto serial = grpo::eval_objective(policy, batch, cfg, Execution::Serial);
  const auto parallel = grpo::eval_objective(policy, batch, cfg, Execution::Parallel);
  CHECK(serial.value == parallel.value);
  REQUIRE(serial.gradient.size() == parallel.gradient.size());
  for (std::size_t j = 0; j < serial.gradient.size(); ++j) {
    CHECK(serial.gradient[j] == parallel.gradient[j]);
  }
}

TEST_CASE("forced decisions contribute neither ratio nor gradient") {
  SoftmaxToy policy({0.3, -0.2, 0.1, 0.0, 0.4});
  grpo::Decision real;
  real.key = 2;
  real.log_prob = policy.decision_log_prob(real);
  grpo::Decision forced;
  forced.key = 4;
  forced.log_prob = 0.0;
  forced.forced = true;

  grpo::ScoredGroup with_forced;
  with_forced.rollouts.push_back({{forced, real}, 1.0});
  with_forced.rollouts.push_back({{forced, real}, -1.0});
  grpo::ScoredGroup bare;
  bare.rollouts.push_back({{real}, 1.0});
  bare.rollouts.push_back({{real}, -1.0});

  grpo::ClipConfig cfg;
  const std::vector<grpo::ScoredGroup> a = {with_forced};
  const std::vector<grpo::ScoredGroup> b = {bare};
  const auto ea = grpo::eval_objective(policy, a, cfg, Execution::Serial);
  const auto eb = grpo::eval_objective(policy, b, cfg, Execution::Serial);
  CHECK(ea.value == doctest::Approx(eb.value).epsilon(1e-12));
  for (std::size_t j = 0; j < ea.gradient.size(); ++j) {
    CHECK(ea.gradient[j] == doctest::Approx(eb.gradient[j]).epsilon(1e-12));
  }
}

TEST_CASE("update_policy single-parameter closed form under plain ascent") {
  // Two rollouts (one per action), rewards +1/-1 -> advantages +1/-1.
  // Objective = (1/2) [A1 * ratio1 + A0 * ratio0]; at theta the gradient is
  // (1/2) [grad log p(1) - grad log p(0)] evaluated with ratio 1 = on-policy:
  // d/dtheta = (1/2) [(1 - p) - (-p)] ... assembled below in closed form.
  const double theta0 = 0.3;
  BernoulliToy policy(theta0);
  const double p = 1.0 / (1.0 + std::exp(-theta0));

  grpo::Decision take1;
  take1.key = 1;
  take1.log_prob = std::log(p);
  grpo::Decision take0;
  take0.key = 0;
  take0.log_prob = std::log(1.0 - p);

  grpo::ScoredGroup group;
  group.rollouts.push_back({{take1}, 1.0});
  group.rollouts.push_back({{take0}, -1.0});
  const std::vector<grpo::ScoredGroup> batch = {group};

  grpo::ClipConfig cfg;
  cfg.learning_rate = 0.05;
  const auto result = grpo::update_policy(policy, batch, cfg, nullptr, Execution::Serial);

  // Advantages normalize to exactly +1/-1; on-policy ratios are 1, so the
  // gradient is (1/2)[(1-p)*(+1) + (-p)*(-1)] = 1/2.
  const double expected_grad = 0.5 * ((1.0 - p) + p);
  CHECK(result.parameters[0] ==
        doctest::Approx(theta0 + cfg.learning_rate * expected_grad).epsilon(1e-12));
  CHECK(policy.theta() == doctest::Approx(result.parameters[0]));
  // Pre-step objective: mean of advantages at ratio 1 -> 0.
  CHECK(result.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("update_policy with zero learning rate or constant rewards is the identity") {
  SoftmaxToy policy({0.1, 0.2, 0.3, 0.4, 0.5});
  Rng rng(8);
  auto batch = random_batch(policy, rng, 2, 4, 2);

  grpo::ClipConfig frozen;
  frozen.learning_rate = 0.0;
  const auto before = policy.parameters();
  const auto r1 = grpo::update_policy(policy, batch, frozen, nullptr, Execution::Serial);
  CHECK(r1.parameters == before);

  // Constant rewards -> all advantages exactly zero -> no movement, objective 0.
  for (auto& group : batch)
    for (auto& r : group.rollouts) r.reward = 0.77;
  grpo::ClipConfig cfg;
  cfg.learning_rate = 0.5;
  const auto r2 = grpo::update_policy(policy, batch, cfg, nullptr, Execution::Serial);
  CHECK(r2.parameters == before);
  CHECK(r2.objective == 0.0);
}

TEST_CASE("update_policy diverges loudly and without mutation on non-finite gradients") {
  PoisonPolicy policy;
  grpo::ScoredGroup group;
  grpo::Decision d;
  d.key = 0;
  d.log_prob = -0.5;
  group.rollouts.push_back({{d}, 1.0});
  group.rollouts.push_back({{d}, -1.0});
  const std::vector<grpo::ScoredGroup> batch = {group};
  grpo::ClipConfig cfg;
  cfg.learning_rate = 0.1;
  CHECK_THROWS_AS(grpo::update_policy(policy, batch, cfg, nullptr, Execution::Serial),
                  adactrl::DivergedError);
  CHECK_FALSE(policy.mutated);
}

TEST_CASE("adam optimizer takes a first step of size learning_rate in the gradient sign") {
  const double theta0 = -0.2;
  BernoulliToy policy(theta0);
  const double p = 1.0 / (1.0 + std::exp(-theta0));
  grpo::Decision take1;
  take1.key = 1;
  take1.log_prob = std::log(p);
  grpo::Decision take0;
  take0.key = 0;
  take0.log_prob = std::log(1.0 - p);
  grpo::ScoredGroup group;
  group.rollouts.push_back({{take1}, 2.0});
  group.rollouts.push_back({{take0}, 0.0});
  const std::vector<grpo::ScoredGroup> batch = {group};

  grpo::ClipConfig cfg;
  cfg.learning_rate = 0.03;
  cfg.optimizer = grpo::Optimizer::Adam;
  grpo::AdamState adam;
  const auto result = grpo::update_policy(policy, batch, cfg, &adam, Execution::Serial);
  // First Adam step with bias correction moves by ~lr * sign(grad); gradient
  // here is +1/2 as in the closed-form case.
  CHECK(result.parameters[0] ==
        doctest::Approx(theta0 + cfg.learning_rate).epsilon(1e-6));
  CHECK(adam.step == 1);
}

TEST_CASE("update_policy errors on empty batches") {
  SoftmaxToy policy({0.0, 0.0});
  const std::vector<grpo::ScoredGroup> empty;
  grpo::ClipConfig cfg;
  CHECK_THROWS_WITH_AS(grpo::update_policy(policy, empty, cfg, nullptr, Execution::Serial),
                       "empty batch", std::invalid_argument);
}
