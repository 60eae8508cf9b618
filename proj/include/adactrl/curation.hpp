#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adactrl/parallel.hpp"
#include "adactrl/response_codec.hpp"

namespace adactrl::curation {

using codec::DifficultyTag;

struct Problem {
  std::string id;
  std::string statement;
  std::string truth;
  std::optional<int> difficulty_level;  // 1..9 when present

  bool operator==(const Problem&) const = default;
};

// Which external generator produced a candidate: a concise instruction model
// or a long-form reasoning model.
enum class Source { Concise, LongReasoning };

std::string_view source_name(Source source);
Source source_from_name(std::string_view name);

struct CandidateResponse {
  std::string problem_id;
  std::string text;
  Source source = Source::Concise;
};

// One supervised training example: difficulty-aware prompt, tag-prefixed
// completion.
struct SftRecord {
  std::string problem_id;
  std::string prompt;
  std::string completion;  // tag literal + ' ' + original response text
  DifficultyTag tag = DifficultyTag::Easy;

  bool operator==(const SftRecord&) const = default;
};

// Instruction texts stored verbatim in every record so downstream training
// sees the exact wording.
inline constexpr std::string_view kBaselinePrompt =
    "Please reason step by step to answer the following Math Problem, and put your "
    "final answer in the format of \\boxed{answer}.";
inline constexpr std::string_view kDifficultyAwarePrompt =
    "Answer the following math problem, judge the difficulty (Easy/Hard) of given "
    "problem and start your response with format: [difficulty here], and put your "
    "final answer in the format \\boxed{answer}.";

enum class PromptStyle { DifficultyAware, Baseline };

std::string build_prompt(const Problem& problem, PromptStyle style);

// Easy for levels 1..5, Hard for 6..9; anything else is rejected.
DifficultyTag classify_level(int level);

struct Quotas {
  std::size_t easy = 0;
  std::size_t hard = 0;
};

// Quota that could not be filled from the available pool.
struct Shortfall {
  std::string pool;  // "easy" or "hard"
  std::size_t requested = 0;
  std::size_t available = 0;

  bool operator==(const Shortfall&) const = default;
};

struct CurationResult {
  std::vector<SftRecord> records;  // sorted by problem id
  std::vector<Shortfall> shortfalls;
};

// Keeps candidates whose boxed answer matches the problem's truth and whose
// source matches the problem's difficulty class (Concise for Easy,
// LongReasoning for Hard), selects at most one candidate per problem, then
// draws up to the quotas by seeded order. Quota shortfalls truncate and are
// recorded, never fatal.
CurationResult build_cold_start(std::span<const Problem> problems,
                                std::span<const CandidateResponse> candidates,
                                Quotas quotas, std::uint64_t seed,
                                PromptStyle style = PromptStyle::DifficultyAware,
                                Execution exec = Execution::Parallel);

struct PoolResult {
  std::vector<Problem> problems;  // sorted by id
  std::vector<Shortfall> shortfalls;
};

// Seeded per-class sample of leveled problems, excluding exclude_ids (keeps
// the RL pool disjoint from the cold-start set).
PoolResult build_rl_pool(std::span<const Problem> problems, Quotas quotas,
                         const std::set<std::string>& exclude_ids, std::uint64_t seed);

}  // namespace adactrl::curation
