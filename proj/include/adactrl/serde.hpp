#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adactrl/curation.hpp"
#include "adactrl/eval.hpp"
#include "adactrl/rewards.hpp"
#include "adactrl/simulator.hpp"

namespace adactrl {

inline constexpr int kSchemaVersion = 1;

}  // namespace adactrl

// to_json/from_json live next to their types so nlohmann finds them by ADL.

namespace adactrl::rewards {

void to_json(nlohmann::json& j, const RolloutRecord& r);
void from_json(const nlohmann::json& j, RolloutRecord& r);
void to_json(nlohmann::json& j, const RewardBreakdown& b);
void from_json(const nlohmann::json& j, RewardBreakdown& b);

}  // namespace adactrl::rewards

namespace adactrl::sim {

void to_json(nlohmann::json& j, const BucketStats& s);
void from_json(const nlohmann::json& j, BucketStats& s);
void to_json(nlohmann::json& j, const StepRecord& r);
void from_json(const nlohmann::json& j, StepRecord& r);

nlohmann::json policy_to_json(const BudgetPolicy& policy);
BudgetPolicy policy_from_json(const nlohmann::json& j);

}  // namespace adactrl::sim

namespace adactrl::eval {

void to_json(nlohmann::json& j, const EvalRecord& r);
void from_json(const nlohmann::json& j, EvalRecord& r);
void to_json(nlohmann::json& j, const Histogram& h);
void from_json(const nlohmann::json& j, Histogram& h);
void to_json(nlohmann::json& j, const TagClassStats& s);
void from_json(const nlohmann::json& j, TagClassStats& s);
void to_json(nlohmann::json& j, const LevelStats& s);
void from_json(const nlohmann::json& j, LevelStats& s);
void to_json(nlohmann::json& j, const DatasetReport& d);
void from_json(const nlohmann::json& j, DatasetReport& d);
void to_json(nlohmann::json& j, const Report& r);
void from_json(const nlohmann::json& j, Report& r);

}  // namespace adactrl::eval

namespace adactrl::curation {

void to_json(nlohmann::json& j, const Problem& p);
void from_json(const nlohmann::json& j, Problem& p);
void to_json(nlohmann::json& j, const CandidateResponse& c);
void from_json(const nlohmann::json& j, CandidateResponse& c);
void to_json(nlohmann::json& j, const SftRecord& r);
void from_json(const nlohmann::json& j, SftRecord& r);
void to_json(nlohmann::json& j, const Shortfall& s);
void from_json(const nlohmann::json& j, Shortfall& s);

}  // namespace adactrl::curation

namespace adactrl::serde {

// Tag fields serialize as "Easy"/"Hard"; a missing tag is null.
nlohmann::json tag_to_json(const std::optional<codec::DifficultyTag>& tag);
std::optional<codec::DifficultyTag> tag_from_json(const nlohmann::json& j);

// Whole-file helpers. Open/read/write failures raise IoError; JSON syntax
// errors raise MalformedInput with a 1-based line number.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, std::span<const nlohmann::json> lines);

}  // namespace adactrl::serde
