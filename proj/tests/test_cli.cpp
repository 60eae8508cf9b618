#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "adactrl/cli.hpp"
#include "adactrl/errors.hpp"
#include "adactrl/serde.hpp"

namespace cli = adactrl::cli;
namespace serde = adactrl::serde;
namespace fs = std::filesystem;
using adactrl::MalformedInput;
using nlohmann::json;

namespace {

#ifndef ADACTRL_BIN
#error "ADACTRL_BIN must be defined by the build"
#endif
#ifndef FIXTURES_DIR
#error "FIXTURES_DIR must be defined by the build"
#endif

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("adactrl_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(ADACTRL_BIN) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  while (true) {
    const std::size_t n = std::fread(buf, 1, sizeof buf, pipe);
    if (n == 0) break;
    result.output.append(buf, n);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string fixture(const std::string& name) {
  return std::string(FIXTURES_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("default config carries the documented hyper-parameters") {
  const auto cfg = cli::default_config();
  CHECK(cfg.at("seed") == 0);
  CHECK(cfg.at("reward.alpha") == 0.5);
  CHECK(cfg.at("reward.beta") == 0.5);
  CHECK(cfg.at("reward.delta") == 0.625);
  CHECK(cfg.at("reward.group_size") == 16);
  CHECK(cfg.at("clip.epsilon") == 0.2);
  CHECK(cfg.at("clip.kl_weight") == 0.0);
  CHECK(cfg.at("sim.buckets") == 8);
  CHECK(cfg.at("sim.bins") == 32);
  CHECK(cfg.at("sim.steps") == 300);
}

TEST_CASE("config precedence: defaults, file, explicit overrides, then seed flag") {
  TempDir dir;
  const auto cfg_path = dir.file("cfg.json");
  serde::write_file(cfg_path, "{\"seed\": 5, \"reward.alpha\": 0.25}\n");

  const auto merged = cli::resolve_config(cfg_path, {"reward.alpha=0.75"}, 9);
  CHECK(merged.at("seed") == 9);            // seed flag wins over the file
  CHECK(merged.at("reward.alpha") == 0.75); // --set wins over the file
  CHECK(merged.at("reward.beta") == 0.5);   // untouched default survives

  const auto file_only = cli::resolve_config(cfg_path, {}, std::nullopt);
  CHECK(file_only.at("seed") == 5);
  CHECK(file_only.at("reward.alpha") == 0.25);

  CHECK_THROWS_AS(cli::resolve_config(cfg_path, {"no_such_key=1"}, std::nullopt),
                  MalformedInput);
  CHECK_THROWS_AS(cli::resolve_config(cfg_path, {"reward.alpha"}, std::nullopt),
                  MalformedInput);
  const auto bad_cfg = dir.file("bad.json");
  serde::write_file(bad_cfg, "{\"unknown.key\": 1}\n");
  CHECK_THROWS_AS(cli::resolve_config(bad_cfg, {}, std::nullopt), MalformedInput);
}

TEST_CASE("config hash is stable and sensitive to values") {
  const auto a = cli::config_hash(cli::default_config());
  const auto b = cli::config_hash(cli::default_config());
  CHECK(a == b);
  CHECK(a.size() == 16);
  auto cfg = cli::default_config();
  cfg["seed"] = 1;
  CHECK(cli::config_hash(cfg) != a);
}

TEST_CASE("print-config emits the resolved configuration") {
  const auto r = run_cli("simulate --print-config --set sim.steps=5");
  CHECK(r.exit_code == 0);
  const auto parsed = json::parse(r.output);
  CHECK(parsed.at("sim.steps") == 5);
  CHECK(parsed.at("reward.delta") == 0.625);
}

TEST_CASE("score command reproduces breakdowns and exit codes") {
  TempDir dir;
  const auto sim_out = dir.file("sim");
  const auto r = run_cli("simulate --seed 3 --out " + sim_out +
                         " --set sim.steps=4 --set sim.batch_size=4"
                         " --set reward.group_size=4 --set sim.samples_per_task=2"
                         " --set sim.tasks_per_difficulty=2"
                         " --set sim.eval_tasks_per_difficulty=1");
  REQUIRE(r.exit_code == 0);

  const auto score_out = dir.file("score");
  const auto s = run_cli("score " + sim_out + "/groups_sample.jsonl --out " + score_out);
  REQUIRE(s.exit_code == 0);

  // Bit-for-bit agreement with the simulator's own export of the same groups.
  const auto exported = serde::read_file(sim_out + "/groups_breakdowns.jsonl");
  const auto rescored = serde::read_file(score_out + "/breakdowns.jsonl");
  CHECK(exported == rescored);

  SUBCASE("missing input file is an I/O failure") {
    const auto miss = run_cli("score " + dir.file("nope.jsonl") + " --out " + score_out);
    CHECK(miss.exit_code == 1);
  }
  SUBCASE("uninterpretable input is malformed") {
    const auto bad = dir.file("bad.jsonl");
    serde::write_file(bad, "this is not json\n");
    const auto res = run_cli("score " + bad + " --out " + score_out);
    CHECK(res.exit_code == 2);
  }
  SUBCASE("empty input reports no groups") {
    const auto empty = dir.file("empty.jsonl");
    serde::write_file(empty, "");
    const auto res = run_cli("score " + empty + " --out " + score_out);
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("no groups") != std::string::npos);
  }
}

TEST_CASE("score accepts raw-text rollouts with ground truth") {
  TempDir dir;
  const auto groups = dir.file("groups.jsonl");
  const json line = {
      {"schema_version", 1},
      {"problem_id", "t1"},
      {"truth", "4"},
      {"rollouts",
       json::array({
           json{{"text", "[Easy] short \\boxed{4}"}},
           json{{"text", "[Hard] a much longer response that is wrong \\boxed{5}"}},
       })},
  };
  serde::write_file(groups, line.dump() + "\n");
  const auto out = dir.file("out");
  const auto r = run_cli("score " + groups + " --out " + out);
  REQUIRE(r.exit_code == 0);

  const auto scored = serde::read_jsonl(out + "/breakdowns.jsonl");
  REQUIRE(scored.size() == 1);
  const auto& rollouts = scored[0].at("rollouts");
  REQUIRE(rollouts.size() == 2);
  CHECK(rollouts[0].at("tag") == "Easy");
  CHECK(rollouts[0].at("correct") == true);
  CHECK(rollouts[1].at("tag") == "Hard");
  CHECK(rollouts[1].at("correct") == false);
  CHECK(scored[0].at("golden_tag") == "Hard");  // 1/2 accuracy < 0.625
}

TEST_CASE("curate command writes sft, pool and manifest with schema versions") {
  TempDir dir;
  const auto out = dir.file("cur");
  const auto r = run_cli("curate --problems " + fixture("problems.jsonl") +
                         " --candidates " + fixture("candidates.jsonl") +
                         " --seed 7 --out " + out);
  REQUIRE(r.exit_code == 0);

  const auto sft = serde::read_jsonl(out + "/sft.jsonl");
  CHECK(sft.size() == 8);  // default quotas 4 + 4
  for (const auto& line : sft) {
    CHECK(line.at("schema_version") == 1);
    CHECK(line.at("completion").is_string());
  }
  const auto pool = serde::read_jsonl(out + "/rl_pool.jsonl");
  CHECK_FALSE(pool.empty());
  for (const auto& line : pool) {
    CHECK(line.at("schema_version") == 1);
  }
  const auto manifest = json::parse(serde::read_file(out + "/manifest.json"));
  CHECK(manifest.at("schema_version") == 1);
  CHECK(manifest.at("seed") == 7);
  CHECK(manifest.contains("config_hash"));

  // Same seed, same outputs.
  const auto out2 = dir.file("cur2");
  const auto r2 = run_cli("curate --problems " + fixture("problems.jsonl") +
                          " --candidates " + fixture("candidates.jsonl") +
                          " --seed 7 --out " + out2);
  REQUIRE(r2.exit_code == 0);
  CHECK(serde::read_file(out + "/sft.jsonl") == serde::read_file(out2 + "/sft.jsonl"));
  CHECK(serde::read_file(out + "/rl_pool.jsonl") ==
        serde::read_file(out2 + "/rl_pool.jsonl"));

  const auto miss = run_cli("curate --problems missing.jsonl --candidates " +
                            fixture("candidates.jsonl") + " --out " + dir.file("x"));
  CHECK(miss.exit_code == 1);
}

TEST_CASE("simulate command produces the documented artifacts") {
  TempDir dir;
  const auto out = dir.file("sim");
  const auto r = run_cli("simulate --seed 1 --out " + out +
                         " --set sim.steps=6 --set sim.batch_size=4"
                         " --set reward.group_size=4 --set sim.samples_per_task=2"
                         " --set sim.tasks_per_difficulty=2"
                         " --set sim.eval_tasks_per_difficulty=1");
  REQUIRE(r.exit_code == 0);

  const auto history = serde::read_jsonl(out + "/history.jsonl");
  CHECK(history.size() == 6);
  for (const auto& line : history) CHECK(line.at("schema_version") == 1);

  const auto policy = json::parse(serde::read_file(out + "/policy.json"));
  CHECK(policy.at("schema_version") == 1);
  CHECK(policy.at("seed") == 1);
  CHECK(policy.contains("config_hash"));

  const auto report = json::parse(serde::read_file(out + "/report.json"));
  CHECK(report.at("schema_version") == 1);
  CHECK(report.at("steps") == 6);
  REQUIRE(report.at("modes").size() == 3);

  CHECK(fs::exists(out + "/history_plot.csv"));
  CHECK(fs::exists(out + "/groups_sample.jsonl"));
  CHECK(fs::exists(out + "/groups_breakdowns.jsonl"));
  CHECK(fs::exists(out + "/eval_records.jsonl"));

  // Determinism across invocations.
  const auto out2 = dir.file("sim2");
  const auto r2 = run_cli("simulate --seed 1 --out " + out2 +
                          " --set sim.steps=6 --set sim.batch_size=4"
                          " --set reward.group_size=4 --set sim.samples_per_task=2"
                          " --set sim.tasks_per_difficulty=2"
                          " --set sim.eval_tasks_per_difficulty=1");
  REQUIRE(r2.exit_code == 0);
  CHECK(serde::read_file(out + "/history.jsonl") ==
        serde::read_file(out2 + "/history.jsonl"));
  CHECK(serde::read_file(out + "/policy.json") == serde::read_file(out2 + "/policy.json"));
}

TEST_CASE("simulate honors forced modes") {
  TempDir dir;
  const auto out = dir.file("forced");
  const auto r = run_cli("simulate --seed 1 --mode force-easy --out " + out +
                         " --set sim.steps=3 --set sim.batch_size=4"
                         " --set reward.group_size=4 --set sim.samples_per_task=2"
                         " --set sim.tasks_per_difficulty=2"
                         " --set sim.eval_tasks_per_difficulty=1");
  REQUIRE(r.exit_code == 0);
  const auto report = json::parse(serde::read_file(out + "/report.json"));
  REQUIRE(report.at("modes").size() == 1);
  CHECK(report.at("modes")[0].at("mode") == "force_easy");

  const auto bad = run_cli("simulate --mode sideways --out " + dir.file("x"));
  CHECK(bad.exit_code == 2);
}

TEST_CASE("evaluate merges records and repeats average") {
  TempDir dir;
  const auto sim_out = dir.file("sim");
  const auto r = run_cli("simulate --seed 2 --out " + sim_out +
                         " --set sim.steps=3 --set sim.batch_size=4"
                         " --set reward.group_size=4 --set sim.samples_per_task=4"
                         " --set sim.tasks_per_difficulty=2"
                         " --set sim.eval_tasks_per_difficulty=2");
  REQUIRE(r.exit_code == 0);

  const auto eval_out = dir.file("eval");
  const auto e = run_cli("evaluate " + sim_out + "/eval_records.jsonl --out " + eval_out);
  REQUIRE(e.exit_code == 0);
  const auto report = json::parse(serde::read_file(eval_out + "/report.json"));
  CHECK(report.at("schema_version") == 1);
  CHECK(report.at("datasets").size() == 3);  // one dataset per mode
  CHECK(fs::exists(eval_out + "/report.csv"));
  CHECK(fs::exists(eval_out + "/report_plot.csv"));

  // Two copies with --repeats: metrics equal the single-run report.
  const auto rep_out = dir.file("eval_rep");
  const auto er = run_cli("evaluate --repeats " + sim_out + "/eval_records.jsonl " +
                          sim_out + "/eval_records.jsonl --out " + rep_out);
  REQUIRE(er.exit_code == 0);
  const auto averaged = json::parse(serde::read_file(rep_out + "/report.json"));
  CHECK(averaged.at("metadata").at("repeats") == "2");
  const auto& single_ds = report.at("datasets")[0];
  const auto& avg_ds = averaged.at("datasets")[0];
  CHECK(avg_ds.at("accuracy_percent").get<double>() ==
        doctest::Approx(single_ds.at("accuracy_percent").get<double>()));
  CHECK(avg_ds.at("mean_length").get<double>() ==
        doctest::Approx(single_ds.at("mean_length").get<double>()));

  const auto miss = run_cli("evaluate nothing.jsonl --out " + dir.file("x"));
  CHECK(miss.exit_code == 1);
  const auto empty = dir.file("none.jsonl");
  serde::write_file(empty, "");
  const auto none = run_cli("evaluate " + empty + " --out " + dir.file("y"));
  CHECK(none.exit_code == 2);
}

TEST_CASE("seed flag overrides a config file seed end to end") {
  TempDir dir;
  const auto cfg = dir.file("cfg.json");
  serde::write_file(cfg, "{\"seed\": 123, \"sim.steps\": 3, \"sim.batch_size\": 4, "
                         "\"reward.group_size\": 4, \"sim.samples_per_task\": 2, "
                         "\"sim.tasks_per_difficulty\": 2, "
                         "\"sim.eval_tasks_per_difficulty\": 1}\n");
  const auto with_flag = dir.file("a");
  const auto with_cfg = dir.file("b");
  REQUIRE(run_cli("simulate --config " + cfg + " --seed 77 --out " + with_flag).exit_code == 0);
  REQUIRE(run_cli("simulate --config " + cfg + " --out " + with_cfg).exit_code == 0);
  const auto a = json::parse(serde::read_file(with_flag + "/policy.json"));
  const auto b = json::parse(serde::read_file(with_cfg + "/policy.json"));
  CHECK(a.at("seed") == 77);
  CHECK(b.at("seed") == 123);
  CHECK(a.at("tag_logits") != b.at("tag_logits"));
}

TEST_CASE("unknown config keys fail fast with exit code 2") {
  TempDir dir;
  const auto r = run_cli("simulate --set nope=1 --out " + dir.file("x"));
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("unknown config key") != std::string::npos);
}
