#include "adactrl/curation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "adactrl/rng.hpp"

namespace adactrl::curation {

namespace {

constexpr std::uint64_t kSelectStream = 0x5e4c2b1a0f9d8e7cULL;  // candidate order
constexpr std::uint64_t kEasyStream = 0x1f2e3d4c5b6a7980ULL;    // easy quota draw
constexpr std::uint64_t kHardStream = 0x8091a2b3c4d5e6f7ULL;    // hard quota draw
constexpr std::uint64_t kPoolEasyStream = 0x3a9f1c5d7e2b4680ULL;
constexpr std::uint64_t kPoolHardStream = 0x6c4e8a2f1d3b5970ULL;

// Deterministic draw of up to `want` entries: order by a per-entry derived key
// and keep the smallest. `entries` must already be in a canonical order.
template <typename T>
std::vector<T> seeded_take(std::vector<T> entries, std::size_t want, std::uint64_t stream) {
  std::vector<std::pair<std::uint64_t, std::size_t>> keys(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    keys[i] = {derive_stream(stream, i), i};
  }
  std::sort(keys.begin(), keys.end());
  std::vector<T> out;
  out.reserve(std::min(want, entries.size()));
  for (std::size_t i = 0; i < keys.size() && out.size() < want; ++i) {
    out.push_back(std::move(entries[keys[i].second]));
  }
  return out;
}

void note_shortfall(std::vector<Shortfall>& shortfalls, const char* pool,
                    std::size_t requested, std::size_t available) {
  if (requested > available) shortfalls.push_back({pool, requested, available});
}

}  // namespace

std::string_view source_name(Source source) {
  switch (source) {
    case Source::Concise: return "concise";
    case Source::LongReasoning: return "long_reasoning";
  }
  throw std::invalid_argument("unknown source");
}

Source source_from_name(std::string_view name) {
  if (name == "concise") return Source::Concise;
  if (name == "long_reasoning") return Source::LongReasoning;
  throw std::invalid_argument("unknown source: " + std::string(name));
}

std::string build_prompt(const Problem& problem, PromptStyle style) {
  const std::string_view instruction =
      style == PromptStyle::DifficultyAware ? kDifficultyAwarePrompt : kBaselinePrompt;
  std::string prompt(instruction);
  prompt += "\n\n";
  prompt += problem.statement;
  return prompt;
}

DifficultyTag classify_level(int level) {
  if (level < 1 || level > 9) throw std::invalid_argument("difficulty level outside [1,9]");
  return level <= 5 ? DifficultyTag::Easy : DifficultyTag::Hard;
}

CurationResult build_cold_start(std::span<const Problem> problems,
                                std::span<const CandidateResponse> candidates,
                                Quotas quotas, std::uint64_t seed, PromptStyle style,
                                Execution exec) {
  std::map<std::string, const Problem*> by_id;
  for (const Problem& p : problems) {
    if (p.difficulty_level) classify_level(*p.difficulty_level);  // validates range
    if (!by_id.emplace(p.id, &p).second) {
      throw std::invalid_argument("duplicate problem id: " + p.id);
    }
  }
  for (const CandidateResponse& c : candidates) {
    if (!by_id.count(c.problem_id)) {
      throw std::invalid_argument("unknown problem id in candidates: " + c.problem_id);
    }
  }

  // Correctness + class-purity filter; one slot per candidate, so it runs in
  // parallel without ordering effects.
  std::vector<char> eligible(candidates.size(), 0);
  for_each_index(candidates.size(), exec, [&](std::size_t i) {
    const CandidateResponse& c = candidates[i];
    const Problem& p = *by_id.at(c.problem_id);
    if (!p.difficulty_level) return;
    const DifficultyTag tag = *p.difficulty_level <= 5 ? DifficultyTag::Easy
                                                       : DifficultyTag::Hard;
    const bool source_ok = (tag == DifficultyTag::Easy && c.source == Source::Concise) ||
                           (tag == DifficultyTag::Hard && c.source == Source::LongReasoning);
    if (!source_ok) return;
    const auto answer = codec::extract_boxed_answer(c.text);
    if (!answer) return;
    if (codec::answers_equivalent(*answer, p.truth)) eligible[i] = 1;
  });

  // At most one candidate per problem: the first eligible one under the
  // seeded candidate order.
  std::map<std::string, std::pair<std::uint64_t, std::size_t>> chosen;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!eligible[i]) continue;
    const std::uint64_t key = derive_stream(seed ^ kSelectStream, i);
    auto [it, inserted] = chosen.emplace(candidates[i].problem_id, std::make_pair(key, i));
    if (!inserted && key < it->second.first) it->second = {key, i};
  }

  // Class pools in sorted-id order (std::map iteration), then the quota draw.
  std::vector<std::pair<const Problem*, std::size_t>> easy_pool, hard_pool;
  for (const auto& [id, pick] : chosen) {
    const Problem* p = by_id.at(id);
    const DifficultyTag tag = classify_level(*p->difficulty_level);
    (tag == DifficultyTag::Easy ? easy_pool : hard_pool).emplace_back(p, pick.second);
  }

  CurationResult result;
  note_shortfall(result.shortfalls, "easy", quotas.easy, easy_pool.size());
  note_shortfall(result.shortfalls, "hard", quotas.hard, hard_pool.size());
  auto easy_take = seeded_take(std::move(easy_pool), quotas.easy, seed ^ kEasyStream);
  auto hard_take = seeded_take(std::move(hard_pool), quotas.hard, seed ^ kHardStream);

  const auto emit = [&](const std::pair<const Problem*, std::size_t>& entry) {
    const Problem& p = *entry.first;
    const CandidateResponse& c = candidates[entry.second];
    SftRecord rec;
    rec.problem_id = p.id;
    rec.prompt = build_prompt(p, style);
    rec.tag = classify_level(*p.difficulty_level);
    rec.completion = std::string(codec::tag_literal(rec.tag)) + " " + c.text;
    result.records.push_back(std::move(rec));
  };
  for (const auto& e : easy_take) emit(e);
  for (const auto& e : hard_take) emit(e);
  std::sort(result.records.begin(), result.records.end(),
            [](const SftRecord& a, const SftRecord& b) { return a.problem_id < b.problem_id; });
  return result;
}

PoolResult build_rl_pool(std::span<const Problem> problems, Quotas quotas,
                         const std::set<std::string>& exclude_ids, std::uint64_t seed) {
  std::map<std::string, const Problem*> by_id;
  for (const Problem& p : problems) {
    if (p.difficulty_level) classify_level(*p.difficulty_level);
    if (!by_id.emplace(p.id, &p).second) {
      throw std::invalid_argument("duplicate problem id: " + p.id);
    }
  }

  std::vector<Problem> easy_pool, hard_pool;
  for (const auto& [id, p] : by_id) {
    if (exclude_ids.count(id)) continue;
    if (!p->difficulty_level) continue;
    (classify_level(*p->difficulty_level) == DifficultyTag::Easy ? easy_pool : hard_pool)
        .push_back(*p);
  }

  PoolResult result;
  note_shortfall(result.shortfalls, "easy", quotas.easy, easy_pool.size());
  note_shortfall(result.shortfalls, "hard", quotas.hard, hard_pool.size());
  auto easy_take = seeded_take(std::move(easy_pool), quotas.easy, seed ^ kPoolEasyStream);
  auto hard_take = seeded_take(std::move(hard_pool), quotas.hard, seed ^ kPoolHardStream);

  result.problems = std::move(easy_take);
  result.problems.insert(result.problems.end(), hard_take.begin(), hard_take.end());
  std::sort(result.problems.begin(), result.problems.end(),
            [](const Problem& a, const Problem& b) { return a.id < b.id; });
  return result;
}

}  // namespace adactrl::curation
