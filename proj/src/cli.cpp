#include "adactrl/cli.hpp"

#include <filesystem>
#include <iostream>
#include <set>
#include <stdexcept>

#include "adactrl/errors.hpp"
#include "adactrl/eval.hpp"
#include "adactrl/grid.hpp"
#include "adactrl/plotdata.hpp"
#include "adactrl/serde.hpp"

namespace adactrl::cli {

namespace {

using nlohmann::json;

bool same_kind(const json& expected, const json& value) {
  if (expected.is_number()) return value.is_number();
  if (expected.is_string()) return value.is_string();
  if (expected.is_boolean()) return value.is_boolean();
  if (expected.is_array()) return value.is_array();
  if (expected.is_null()) return true;  // untyped slot, e.g. optional knobs
  return expected.type() == value.type();
}

void apply_key(json& config, const std::string& key, const json& value) {
  if (!config.contains(key)) throw MalformedInput("unknown config key: " + key);
  if (!same_kind(config.at(key), value) && !config.at(key).is_null()) {
    throw MalformedInput("config key has wrong type: " + key);
  }
  config[key] = value;
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
}

std::string out_path(const std::string& out_dir, const char* name) {
  return (std::filesystem::path(out_dir) / name).string();
}

// One cmd_score output line: group identity, golden tag, and the per-rollout
// record + breakdown fields.
json score_line(const std::string& problem_id,
                std::span<const rewards::RolloutRecord> records,
                std::span<const rewards::RewardBreakdown> breakdowns) {
  json rollouts = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    rollouts.push_back({{"tag", serde::tag_to_json(records[i].tag)},
                        {"correct", records[i].correct},
                        {"length", records[i].length},
                        {"outcome", breakdowns[i].outcome},
                        {"calibration", breakdowns[i].calibration},
                        {"length_reward", breakdowns[i].length_reward},
                        {"combined", breakdowns[i].combined}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"problem_id", problem_id},
              {"golden_tag", std::string(codec::tag_name(breakdowns.front().golden_tag))},
              {"rollouts", rollouts}};
}

std::vector<double> doubles_of(const json& arr) {
  return arr.get<std::vector<double>>();
}

}  // namespace

json default_config() {
  return json{
      {"seed", 0},
      {"reward.alpha", 0.5},
      {"reward.beta", 0.5},
      {"reward.delta", 0.625},
      {"reward.group_size", 16},
      {"clip.epsilon", 0.2},
      {"clip.std_floor", 1e-6},
      // Desk-scale step size for the synthetic policy; the library-level
      // optimizer default is far smaller and aimed at fine-tuning regimes.
      {"clip.learning_rate", 1.0},
      {"clip.kl_weight", 0.0},
      {"clip.optimizer", "ascent"},
      {"sim.buckets", 8},
      {"sim.bins", 32},
      {"sim.bin_lo", 16.0},
      {"sim.bin_hi", 24576.0},
      // Threshold curve chosen so the hardest tasks stay well below the
      // golden-tag accuracy cutoff even at the largest budget bin: otherwise
      // sustained training makes "hard" problems cheap enough that the
      // group-relative golden tag flips to Easy and the tag head oscillates.
      {"sim.tau_min", -800.0},
      {"sim.tau_max", 23200.0},
      {"sim.width", 300.0},
      {"sim.steps", 300},
      {"sim.batch_size", 8},
      {"sim.difficulties", json::array({0.05, 0.95})},
      {"sim.tasks_per_difficulty", 8},
      {"sim.eval_difficulties", json::array({0.05, 0.95, 0.95, 0.95})},
      {"sim.eval_tasks_per_difficulty", 4},
      {"sim.samples_per_task", 32},
      {"sim.cold_start_easy_fractions", nullptr},
      {"eval.hist_lo", 16.0},
      {"eval.hist_hi", 24576.0},
      {"eval.hist_bins", 32},
      {"curate.easy_quota", 4},
      {"curate.hard_quota", 4},
      {"curate.pool_easy", 6},
      {"curate.pool_hard", 6},
      {"curate.prompt_style", "difficulty_aware"},
  };
}

nlohmann::json resolve_config(const std::optional<std::string>& config_path,
                              const std::vector<std::string>& key_value_overrides,
                              const std::optional<std::uint64_t>& seed_flag) {
  json config = default_config();

  if (config_path) {
    json file;
    try {
      file = json::parse(serde::read_file(*config_path));
    } catch (const json::parse_error& e) {
      throw MalformedInput(*config_path + ": " + e.what());
    }
    if (!file.is_object()) throw MalformedInput(*config_path + ": config must be an object");
    for (const auto& [key, value] : file.items()) apply_key(config, key, value);
  }

  for (const std::string& kv : key_value_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw MalformedInput("override must be key=value: " + kv);
    }
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // bare strings stay strings
    }
    apply_key(config, key, value);
  }

  if (seed_flag) config["seed"] = *seed_flag;
  return config;
}

std::string config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

std::uint64_t seed_of(const nlohmann::json& config) {
  return config.at("seed").get<std::uint64_t>();
}

rewards::RewardConfig reward_config(const nlohmann::json& config) {
  rewards::RewardConfig cfg;
  cfg.alpha = config.at("reward.alpha").get<double>();
  cfg.beta = config.at("reward.beta").get<double>();
  cfg.delta = config.at("reward.delta").get<double>();
  cfg.group_size = config.at("reward.group_size").get<int>();
  return cfg;
}

grpo::ClipConfig clip_config(const nlohmann::json& config) {
  grpo::ClipConfig cfg;
  cfg.epsilon = config.at("clip.epsilon").get<double>();
  cfg.std_floor = config.at("clip.std_floor").get<double>();
  cfg.learning_rate = config.at("clip.learning_rate").get<double>();
  cfg.kl_weight = config.at("clip.kl_weight").get<double>();
  const auto name = config.at("clip.optimizer").get<std::string>();
  if (name == "ascent") {
    cfg.optimizer = grpo::Optimizer::Ascent;
  } else if (name == "adam") {
    cfg.optimizer = grpo::Optimizer::Adam;
  } else {
    throw MalformedInput("clip.optimizer must be \"ascent\" or \"adam\"");
  }
  return cfg;
}

sim::SimulatorConfig simulator_config(const nlohmann::json& config) {
  sim::SimulatorConfig cfg;
  cfg.buckets = config.at("sim.buckets").get<int>();
  cfg.bins = config.at("sim.bins").get<int>();
  cfg.bin_lo = config.at("sim.bin_lo").get<double>();
  cfg.bin_hi = config.at("sim.bin_hi").get<double>();
  cfg.success.tau_min = config.at("sim.tau_min").get<double>();
  cfg.success.tau_max = config.at("sim.tau_max").get<double>();
  cfg.success.width = config.at("sim.width").get<double>();
  cfg.batch_size = config.at("sim.batch_size").get<int>();
  const auto& fractions = config.at("sim.cold_start_easy_fractions");
  if (!fractions.is_null()) cfg.cold_start_easy_fractions = doubles_of(fractions);
  return cfg;
}

std::vector<sim::SyntheticTask> training_tasks(const nlohmann::json& config) {
  return sim::make_mixed_tasks(doubles_of(config.at("sim.difficulties")),
                               config.at("sim.tasks_per_difficulty").get<int>(),
                               config.at("sim.buckets").get<int>());
}

std::vector<sim::SyntheticTask> evaluation_tasks(const nlohmann::json& config) {
  return sim::make_mixed_tasks(doubles_of(config.at("sim.eval_difficulties")),
                               config.at("sim.eval_tasks_per_difficulty").get<int>(),
                               config.at("sim.buckets").get<int>());
}

int cmd_score(const std::string& groups_file, const nlohmann::json& config,
              const std::string& out_dir) {
  const auto lines = serde::read_jsonl(groups_file);
  if (lines.empty()) throw MalformedInput("no groups");
  const auto reward_cfg = reward_config(config);

  std::vector<std::vector<rewards::RolloutRecord>> groups;
  std::vector<std::string> ids;
  groups.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = groups_file + " line " + std::to_string(i + 1) + ": ";
    try {
      const json& line = lines[i];
      const auto problem_id = line.at("problem_id").get<std::string>();
      std::optional<std::string> truth;
      if (line.contains("truth") && !line.at("truth").is_null()) {
        truth = line.at("truth").get<std::string>();
      }
      const json& rollouts = line.at("rollouts");
      if (!rollouts.is_array() || rollouts.size() < 2) {
        throw MalformedInput(where + "degenerate group");
      }
      std::vector<rewards::RolloutRecord> group;
      group.reserve(rollouts.size());
      for (const json& r : rollouts) {
        rewards::RolloutRecord rec;
        rec.problem_id = problem_id;
        if (r.contains("text")) {
          if (!truth) throw MalformedInput(where + "raw-text rollout requires truth");
          const auto text = r.at("text").get<std::string>();
          const auto parsed = codec::parse_response(text);
          rec.tag = parsed.tag;
          rec.correct = parsed.final_answer &&
                        codec::answers_equivalent(*parsed.final_answer, *truth);
          std::optional<long long> explicit_len;
          if (r.contains("length")) explicit_len = r.at("length").get<long long>();
          rec.length = codec::measure_length(explicit_len, text);
        } else {
          if (r.contains("problem_id") &&
              r.at("problem_id").get<std::string>() != problem_id) {
            throw MalformedInput(where + "mixed problem ids in rollout group");
          }
          rec.tag = r.contains("tag") ? serde::tag_from_json(r.at("tag")) : std::nullopt;
          rec.correct = r.at("correct").get<bool>();
          const auto len = r.at("length").get<long long>();
          if (len < 0) throw MalformedInput(where + "negative length");
          rec.length = static_cast<std::uint64_t>(len);
        }
        group.push_back(std::move(rec));
      }
      groups.push_back(std::move(group));
      ids.push_back(problem_id);
    } catch (const MalformedInput&) {
      throw;
    } catch (const json::exception& e) {
      throw MalformedInput(where + e.what());
    } catch (const std::invalid_argument& e) {
      throw MalformedInput(where + e.what());
    }
  }

  const auto scored = rewards::score_groups(groups, reward_cfg, Execution::Parallel);
  std::vector<json> out_lines;
  out_lines.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out_lines.push_back(score_line(ids[g], groups[g], scored[g]));
  }

  ensure_out_dir(out_dir);
  const auto path = out_path(out_dir, "breakdowns.jsonl");
  serde::write_jsonl(path, out_lines);
  std::cout << "scored " << groups.size() << " groups -> " << path << "\n";
  return 0;
}

int cmd_curate(const std::string& problems_file, const std::string& candidates_file,
               const nlohmann::json& config, const std::string& out_dir) {
  const auto parse_all = [](const std::string& path, auto& out) {
    const auto lines = serde::read_jsonl(path);
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        out.push_back(lines[i].get<typename std::decay_t<decltype(out)>::value_type>());
      } catch (const MalformedInput& e) {
        throw MalformedInput(path + " line " + std::to_string(i + 1) + ": " + e.what());
      } catch (const json::exception& e) {
        throw MalformedInput(path + " line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  };
  std::vector<curation::Problem> problems;
  std::vector<curation::CandidateResponse> candidates;
  parse_all(problems_file, problems);
  parse_all(candidates_file, candidates);

  const std::uint64_t seed = seed_of(config);
  const curation::Quotas sft_quotas{
      config.at("curate.easy_quota").get<std::size_t>(),
      config.at("curate.hard_quota").get<std::size_t>()};
  const curation::Quotas pool_quotas{config.at("curate.pool_easy").get<std::size_t>(),
                                     config.at("curate.pool_hard").get<std::size_t>()};
  const auto style_name = config.at("curate.prompt_style").get<std::string>();
  curation::PromptStyle style;
  if (style_name == "difficulty_aware") {
    style = curation::PromptStyle::DifficultyAware;
  } else if (style_name == "baseline") {
    style = curation::PromptStyle::Baseline;
  } else {
    throw MalformedInput("curate.prompt_style must be \"difficulty_aware\" or \"baseline\"");
  }

  const auto cold = curation::build_cold_start(problems, candidates, sft_quotas, seed,
                                               style, Execution::Parallel);
  std::set<std::string> exclude;
  for (const auto& rec : cold.records) exclude.insert(rec.problem_id);
  const auto pool = curation::build_rl_pool(problems, pool_quotas, exclude, seed);

  for (const auto& s : cold.shortfalls) {
    std::cerr << "warning: cold-start " << s.pool << " quota " << s.requested
              << " exceeds available " << s.available << "; truncated\n";
  }
  for (const auto& s : pool.shortfalls) {
    std::cerr << "warning: rl-pool " << s.pool << " quota " << s.requested
              << " exceeds available " << s.available << "; truncated\n";
  }

  std::size_t sft_easy = 0;
  for (const auto& rec : cold.records) {
    if (rec.tag == codec::DifficultyTag::Easy) ++sft_easy;
  }
  std::size_t pool_easy = 0;
  for (const auto& p : pool.problems) {
    if (p.difficulty_level && *p.difficulty_level <= 5) ++pool_easy;
  }

  ensure_out_dir(out_dir);
  std::vector<json> sft_lines;
  for (const auto& rec : cold.records) {
    json j = rec;
    j["schema_version"] = kSchemaVersion;
    sft_lines.push_back(std::move(j));
  }
  serde::write_jsonl(out_path(out_dir, "sft.jsonl"), sft_lines);

  std::vector<json> pool_lines;
  for (const auto& p : pool.problems) {
    json j = p;
    j["schema_version"] = kSchemaVersion;
    pool_lines.push_back(std::move(j));
  }
  serde::write_jsonl(out_path(out_dir, "rl_pool.jsonl"), pool_lines);

  const json manifest{
      {"schema_version", kSchemaVersion},
      {"seed", seed},
      {"config_hash", config_hash(config)},
      {"prompt_style", style_name},
      {"counts",
       {{"sft_easy", sft_easy},
        {"sft_hard", cold.records.size() - sft_easy},
        {"sft_total", cold.records.size()},
        {"pool_easy", pool_easy},
        {"pool_hard", pool.problems.size() - pool_easy},
        {"pool_total", pool.problems.size()}}},
      {"shortfalls", {{"cold_start", cold.shortfalls}, {"rl_pool", pool.shortfalls}}}};
  serde::write_file(out_path(out_dir, "manifest.json"), manifest.dump(2) + "\n");

  std::cout << "curated " << cold.records.size() << " sft records, " << pool.problems.size()
            << " pool problems -> " << out_dir << "\n";
  return 0;
}

namespace {

std::optional<sim::Mode> mode_filter(const std::string& mode) {
  if (mode == "all") return std::nullopt;
  if (mode == "adaptive") return sim::Mode::Adaptive;
  if (mode == "force-easy" || mode == "force_easy") return sim::Mode::ForceEasy;
  if (mode == "force-hard" || mode == "force_hard") return sim::Mode::ForceHard;
  throw MalformedInput("unknown mode: " + mode +
                       " (expected all, adaptive, force-easy or force-hard)");
}

json mode_report(const sim::ModeEvaluation& ev) {
  json buckets = json::array();
  for (const auto& b : ev.buckets) {
    buckets.push_back(
        {{"count", b.count}, {"accuracy", b.accuracy}, {"mean_length", b.mean_length}});
  }
  json j{{"mode", std::string(sim::mode_name(ev.mode))},
         {"accuracy", ev.accuracy},
         {"mean_length", ev.mean_length},
         {"buckets", buckets}};
  if (ev.mean_reward) j["mean_reward"] = *ev.mean_reward;
  return j;
}

}  // namespace

int cmd_simulate(const nlohmann::json& config, const std::string& out_dir,
                 const std::string& mode) {
  const auto filter = mode_filter(mode);
  const auto reward_cfg = reward_config(config);
  const auto clip_cfg = clip_config(config);
  const auto sim_cfg = simulator_config(config);
  const auto tasks = training_tasks(config);
  const int steps = config.at("sim.steps").get<int>();
  const std::uint64_t seed = seed_of(config);

  const auto result = sim::run_training(tasks, reward_cfg, clip_cfg, sim_cfg, steps, seed,
                                        Execution::Parallel);

  ensure_out_dir(out_dir);
  std::vector<json> history_lines;
  history_lines.reserve(result.history.steps.size());
  for (const auto& rec : result.history.steps) history_lines.emplace_back(rec);
  serde::write_jsonl(out_path(out_dir, "history.jsonl"), history_lines);

  json policy = sim::policy_to_json(result.policy);
  policy["seed"] = seed;
  policy["config_hash"] = config_hash(config);
  serde::write_file(out_path(out_dir, "policy.json"), policy.dump(2) + "\n");

  const auto rows = sim::history_plot_rows(result.history);
  serde::write_file(out_path(out_dir, "history_plot.csv"), tidy_csv(rows));

  // Last-step rollout groups in cmd_score's input format, plus the breakdowns
  // actually used for the final update — lets the score command be replayed
  // against in-process values.
  std::vector<json> group_lines, breakdown_lines;
  for (std::size_t g = 0; g < result.last_step.groups.size(); ++g) {
    const auto& group = result.last_step.groups[g];
    json rollouts = json::array();
    std::vector<rewards::RolloutRecord> records;
    for (const auto& r : group) {
      rollouts.push_back({{"tag", serde::tag_to_json(r.record.tag)},
                          {"correct", r.record.correct},
                          {"length", r.record.length}});
      records.push_back(r.record);
    }
    group_lines.push_back(json{{"schema_version", kSchemaVersion},
                               {"problem_id", group.front().record.problem_id},
                               {"truth", ""},
                               {"rollouts", rollouts}});
    breakdown_lines.push_back(
        score_line(group.front().record.problem_id, records, result.last_step.breakdowns[g]));
  }
  serde::write_jsonl(out_path(out_dir, "groups_sample.jsonl"), group_lines);
  serde::write_jsonl(out_path(out_dir, "groups_breakdowns.jsonl"), breakdown_lines);

  const auto eval_tasks = evaluation_tasks(config);
  const int samples = config.at("sim.samples_per_task").get<int>();
  auto evals = sim::evaluate_modes(result.policy, eval_tasks, reward_cfg, sim_cfg, samples,
                                   seed, Execution::Parallel);

  json modes = json::array();
  std::vector<json> record_lines;
  for (const auto& ev : evals) {
    if (filter && ev.mode != *filter) continue;
    modes.push_back(mode_report(ev));
    for (const auto& r : ev.rollouts) {
      eval::EvalRecord rec;
      rec.problem_id = r.record.problem_id;
      rec.dataset_label = std::string(sim::mode_name(ev.mode));
      rec.tag = r.record.tag;
      rec.correct = r.record.correct;
      rec.length = r.record.length;
      rec.difficulty_level = sim::level_from_difficulty(r.difficulty);
      json j = rec;
      j["schema_version"] = kSchemaVersion;
      record_lines.push_back(std::move(j));
    }
  }
  serde::write_jsonl(out_path(out_dir, "eval_records.jsonl"), record_lines);

  const auto& final_step = result.history.steps.back();
  const json report{{"schema_version", kSchemaVersion},
                    {"seed", seed},
                    {"config_hash", config_hash(config)},
                    {"steps", steps},
                    {"final_step", final_step},
                    {"modes", modes}};
  serde::write_file(out_path(out_dir, "report.json"), report.dump(2) + "\n");

  std::cout << "trained " << steps << " steps on " << tasks.size() << " tasks -> " << out_dir
            << "\n";
  return 0;
}

int cmd_evaluate(const std::vector<std::string>& records_files, bool repeats,
                 const nlohmann::json& config, const std::string& out_dir) {
  if (records_files.empty()) throw MalformedInput("no records files given");
  const auto edges = log_spaced_edges(config.at("eval.hist_lo").get<double>(),
                                      config.at("eval.hist_hi").get<double>(),
                                      config.at("eval.hist_bins").get<int>());

  const auto load_records = [](const std::string& path) {
    const auto lines = serde::read_jsonl(path);
    std::vector<eval::EvalRecord> records;
    records.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        records.push_back(lines[i].get<eval::EvalRecord>());
      } catch (const MalformedInput& e) {
        throw MalformedInput(path + " line " + std::to_string(i + 1) + ": " + e.what());
      } catch (const json::exception& e) {
        throw MalformedInput(path + " line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
    return records;
  };

  eval::Report report;
  if (repeats) {
    std::vector<eval::Report> reports;
    reports.reserve(records_files.size());
    for (const auto& path : records_files) {
      reports.push_back(eval::aggregate(load_records(path), edges, Execution::Parallel));
    }
    report = eval::repeat_average(reports);
  } else {
    std::vector<eval::EvalRecord> all;
    for (const auto& path : records_files) {
      auto records = load_records(path);
      all.insert(all.end(), std::make_move_iterator(records.begin()),
                 std::make_move_iterator(records.end()));
    }
    report = eval::aggregate(all, edges, Execution::Parallel);
  }
  report.metadata["config_hash"] = config_hash(config);
  report.metadata["seed"] = std::to_string(seed_of(config));

  ensure_out_dir(out_dir);
  serde::write_file(out_path(out_dir, "report.json"), eval::emit(report, eval::Format::JSON));
  serde::write_file(out_path(out_dir, "report.csv"), eval::emit(report, eval::Format::CSV));
  serde::write_file(out_path(out_dir, "report_plot.csv"),
                    eval::emit(report, eval::Format::PlotData));
  std::cout << "evaluated " << records_files.size()
            << (records_files.size() == 1 ? " file" : " files") << " -> " << out_dir << "\n";
  return 0;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const MalformedInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DivergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace adactrl::cli
