#include "adactrl/serde.hpp"

#include <fstream>
#include <map>

#include "adactrl/errors.hpp"

namespace adactrl::serde {

nlohmann::json tag_to_json(const std::optional<codec::DifficultyTag>& tag) {
  if (!tag) return nullptr;
  return std::string(codec::tag_name(*tag));
}

std::optional<codec::DifficultyTag> tag_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  const auto name = j.get<std::string>();
  const auto tag = codec::tag_from_name(name);
  if (!tag) throw MalformedInput("unknown difficulty tag: " + name);
  return tag;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  return content;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<nlohmann::json> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      lines.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedInput(path + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("read failed: " + path);
  return lines;
}

void write_jsonl(const std::string& path, std::span<const nlohmann::json> lines) {
  std::string out;
  for (const auto& j : lines) {
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace adactrl::serde

namespace adactrl::rewards {

void to_json(nlohmann::json& j, const RolloutRecord& r) {
  j = nlohmann::json{{"problem_id", r.problem_id},
                     {"tag", serde::tag_to_json(r.tag)},
                     {"correct", r.correct},
                     {"length", r.length}};
}

void from_json(const nlohmann::json& j, RolloutRecord& r) {
  r.problem_id = j.value("problem_id", std::string());
  r.tag = j.contains("tag") ? serde::tag_from_json(j.at("tag")) : std::nullopt;
  r.correct = j.at("correct").get<bool>();
  r.length = j.at("length").get<std::uint64_t>();
}

void to_json(nlohmann::json& j, const RewardBreakdown& b) {
  j = nlohmann::json{{"outcome", b.outcome},
                     {"calibration", b.calibration},
                     {"length_reward", b.length_reward},
                     {"combined", b.combined},
                     {"golden_tag", std::string(codec::tag_name(b.golden_tag))}};
}

void from_json(const nlohmann::json& j, RewardBreakdown& b) {
  b.outcome = j.at("outcome").get<double>();
  b.calibration = j.at("calibration").get<double>();
  b.length_reward = j.at("length_reward").get<double>();
  b.combined = j.at("combined").get<double>();
  const auto tag = serde::tag_from_json(j.at("golden_tag"));
  if (!tag) throw MalformedInput("golden_tag must be Easy or Hard");
  b.golden_tag = *tag;
}

}  // namespace adactrl::rewards

namespace adactrl::sim {

void to_json(nlohmann::json& j, const BucketStats& s) {
  j = nlohmann::json{{"count", s.count},
                     {"easy_proportion", s.easy_proportion},
                     {"mean_budget", s.mean_budget},
                     {"accuracy", s.accuracy}};
}

void from_json(const nlohmann::json& j, BucketStats& s) {
  s.count = j.at("count").get<std::uint64_t>();
  s.easy_proportion = j.at("easy_proportion").get<double>();
  s.mean_budget = j.at("mean_budget").get<double>();
  s.accuracy = j.at("accuracy").get<double>();
}

void to_json(nlohmann::json& j, const StepRecord& r) {
  j = nlohmann::json{{"schema_version", kSchemaVersion},
                     {"step", r.step},
                     {"mean_reward", r.mean_reward},
                     {"accuracy", r.accuracy},
                     {"mean_budget", r.mean_budget},
                     {"objective", r.objective},
                     {"buckets", r.buckets}};
}

void from_json(const nlohmann::json& j, StepRecord& r) {
  r.step = j.at("step").get<int>();
  r.mean_reward = j.at("mean_reward").get<double>();
  r.accuracy = j.at("accuracy").get<double>();
  r.mean_budget = j.at("mean_budget").get<double>();
  r.objective = j.at("objective").get<double>();
  r.buckets = j.at("buckets").get<std::vector<BucketStats>>();
}

nlohmann::json policy_to_json(const BudgetPolicy& policy) {
  const auto params = policy.parameters();
  std::vector<double> tag_logits(params.begin(),
                                 params.begin() + static_cast<std::ptrdiff_t>(policy.buckets()));
  const auto rows = [&](DifficultyTag tag) {
    std::vector<std::vector<double>> out;
    for (int b = 0; b < policy.buckets(); ++b) {
      const std::size_t off = policy.budget_offset(b, tag);
      out.emplace_back(params.begin() + static_cast<std::ptrdiff_t>(off),
                       params.begin() + static_cast<std::ptrdiff_t>(off + policy.bins()));
    }
    return out;
  };
  return nlohmann::json{{"schema_version", kSchemaVersion},
                        {"buckets", policy.buckets()},
                        {"bins", policy.bins()},
                        {"bin_lo", policy.bin_lo()},
                        {"bin_hi", policy.bin_hi()},
                        {"tag_logits", tag_logits},
                        {"budget_logits",
                         {{"easy", rows(DifficultyTag::Easy)},
                          {"hard", rows(DifficultyTag::Hard)}}}};
}

BudgetPolicy policy_from_json(const nlohmann::json& j) {
  const int buckets = j.at("buckets").get<int>();
  const int bins = j.at("bins").get<int>();
  BudgetPolicy policy(buckets, bins, j.at("bin_lo").get<double>(),
                      j.at("bin_hi").get<double>());
  std::vector<double> params(policy.parameter_count(), 0.0);
  const auto tag_logits = j.at("tag_logits").get<std::vector<double>>();
  if (static_cast<int>(tag_logits.size()) != buckets) {
    throw MalformedInput("tag_logits size does not match buckets");
  }
  std::copy(tag_logits.begin(), tag_logits.end(), params.begin());
  const auto load_rows = [&](const char* key, DifficultyTag tag) {
    const auto rows = j.at("budget_logits").at(key).get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != buckets) {
      throw MalformedInput("budget_logits rows do not match buckets");
    }
    for (int b = 0; b < buckets; ++b) {
      if (static_cast<int>(rows[static_cast<std::size_t>(b)].size()) != bins) {
        throw MalformedInput("budget_logits row size does not match bins");
      }
      std::copy(rows[static_cast<std::size_t>(b)].begin(),
                rows[static_cast<std::size_t>(b)].end(),
                params.begin() + static_cast<std::ptrdiff_t>(policy.budget_offset(b, tag)));
    }
  };
  load_rows("easy", DifficultyTag::Easy);
  load_rows("hard", DifficultyTag::Hard);
  policy.set_parameters(params);
  return policy;
}

}  // namespace adactrl::sim

namespace adactrl::eval {

void to_json(nlohmann::json& j, const EvalRecord& r) {
  j = nlohmann::json{{"problem_id", r.problem_id},
                     {"dataset_label", r.dataset_label},
                     {"tag", serde::tag_to_json(r.tag)},
                     {"correct", r.correct},
                     {"length", r.length}};
  if (r.difficulty_level) {
    j["difficulty_level"] = *r.difficulty_level;
  } else {
    j["difficulty_level"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, EvalRecord& r) {
  r.problem_id = j.value("problem_id", std::string());
  r.dataset_label = j.value("dataset_label", std::string("default"));
  r.tag = j.contains("tag") ? serde::tag_from_json(j.at("tag")) : std::nullopt;
  r.correct = j.at("correct").get<bool>();
  r.length = j.at("length").get<std::uint64_t>();
  if (j.contains("difficulty_level") && !j.at("difficulty_level").is_null()) {
    r.difficulty_level = j.at("difficulty_level").get<int>();
  } else {
    r.difficulty_level = std::nullopt;
  }
}

void to_json(nlohmann::json& j, const Histogram& h) {
  j = nlohmann::json{{"edges", h.edges}, {"counts", h.counts}};
}

void from_json(const nlohmann::json& j, Histogram& h) {
  h.edges = j.at("edges").get<std::vector<double>>();
  h.counts = j.at("counts").get<std::vector<double>>();
}

void to_json(nlohmann::json& j, const TagClassStats& s) {
  j = nlohmann::json{{"count", s.count}, {"proportion", s.proportion}, {"lengths", s.lengths}};
}

void from_json(const nlohmann::json& j, TagClassStats& s) {
  s.count = j.at("count").get<double>();
  s.proportion = j.at("proportion").get<double>();
  s.lengths = j.at("lengths").get<Histogram>();
}

void to_json(nlohmann::json& j, const LevelStats& s) {
  j = nlohmann::json{{"count", s.count}, {"mean_length", s.mean_length}};
}

void from_json(const nlohmann::json& j, LevelStats& s) {
  s.count = j.at("count").get<double>();
  s.mean_length = j.at("mean_length").get<double>();
}

void to_json(nlohmann::json& j, const DatasetReport& d) {
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [level, stats] : d.levels) levels[std::to_string(level)] = stats;
  j = nlohmann::json{{"dataset_label", d.dataset_label},
                     {"count", d.count},
                     {"accuracy_percent", d.accuracy_percent},
                     {"mean_length", d.mean_length},
                     {"levels", levels},
                     {"easy", d.easy},
                     {"hard", d.hard},
                     {"untagged", d.untagged}};
}

void from_json(const nlohmann::json& j, DatasetReport& d) {
  d.dataset_label = j.at("dataset_label").get<std::string>();
  d.count = j.at("count").get<double>();
  d.accuracy_percent = j.at("accuracy_percent").get<double>();
  d.mean_length = j.at("mean_length").get<double>();
  d.levels.clear();
  for (const auto& [key, value] : j.at("levels").items()) {
    d.levels[std::stoi(key)] = value.get<LevelStats>();
  }
  d.easy = j.at("easy").get<TagClassStats>();
  d.hard = j.at("hard").get<TagClassStats>();
  d.untagged = j.at("untagged").get<TagClassStats>();
}

void to_json(nlohmann::json& j, const Report& r) {
  j = nlohmann::json{{"schema_version", kSchemaVersion},
                     {"datasets", r.datasets},
                     {"metadata", r.metadata}};
}

void from_json(const nlohmann::json& j, Report& r) {
  r.datasets = j.at("datasets").get<std::vector<DatasetReport>>();
  r.metadata.clear();
  if (j.contains("metadata")) {
    r.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  }
}

}  // namespace adactrl::eval

namespace adactrl::curation {

void to_json(nlohmann::json& j, const Problem& p) {
  j = nlohmann::json{{"id", p.id}, {"statement", p.statement}, {"truth", p.truth}};
  if (p.difficulty_level) {
    j["difficulty_level"] = *p.difficulty_level;
  } else {
    j["difficulty_level"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, Problem& p) {
  p.id = j.at("id").get<std::string>();
  p.statement = j.at("statement").get<std::string>();
  p.truth = j.at("truth").get<std::string>();
  if (j.contains("difficulty_level") && !j.at("difficulty_level").is_null()) {
    p.difficulty_level = j.at("difficulty_level").get<int>();
  } else {
    p.difficulty_level = std::nullopt;
  }
}

void to_json(nlohmann::json& j, const CandidateResponse& c) {
  j = nlohmann::json{{"problem_id", c.problem_id},
                     {"text", c.text},
                     {"source", std::string(source_name(c.source))}};
}

void from_json(const nlohmann::json& j, CandidateResponse& c) {
  c.problem_id = j.at("problem_id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  try {
    c.source = source_from_name(j.at("source").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw MalformedInput(e.what());
  }
}

void to_json(nlohmann::json& j, const SftRecord& r) {
  j = nlohmann::json{{"problem_id", r.problem_id},
                     {"prompt", r.prompt},
                     {"completion", r.completion},
                     {"tag", std::string(codec::tag_name(r.tag))}};
}

void from_json(const nlohmann::json& j, SftRecord& r) {
  r.problem_id = j.at("problem_id").get<std::string>();
  r.prompt = j.at("prompt").get<std::string>();
  r.completion = j.at("completion").get<std::string>();
  const auto tag = serde::tag_from_json(j.at("tag"));
  if (!tag) throw MalformedInput("sft record tag must be Easy or Hard");
  r.tag = *tag;
}

void to_json(nlohmann::json& j, const Shortfall& s) {
  j = nlohmann::json{{"pool", s.pool}, {"requested", s.requested}, {"available", s.available}};
}

void from_json(const nlohmann::json& j, Shortfall& s) {
  s.pool = j.at("pool").get<std::string>();
  s.requested = j.at("requested").get<std::size_t>();
  s.available = j.at("available").get<std::size_t>();
}

}  // namespace adactrl::curation
