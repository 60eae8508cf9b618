#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adactrl/cli.hpp"
#include "adactrl/errors.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out = "out";
  bool print_config = false;
  std::vector<std::string> sets;
  CLI::Option* config_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  args.config_opt =
      cmd->add_option("--config", args.config, "JSON config file with flat dotted keys");
  args.seed_opt = cmd->add_option("--seed", args.seed, "Override the run seed");
  cmd->add_option("--out", args.out, "Output directory")->capture_default_str();
  cmd->add_flag("--print-config", args.print_config,
                "Print the fully-resolved configuration as JSON and exit");
  cmd->add_option("--set", args.sets, "Override one config key (key=value, repeatable)");
}

nlohmann::json resolve(const CommonArgs& args) {
  std::optional<std::string> config_path;
  if (args.config_opt->count() > 0) config_path = args.config;
  std::optional<std::uint64_t> seed_flag;
  if (args.seed_opt->count() > 0) seed_flag = args.seed;
  return adactrl::cli::resolve_config(config_path, args.sets, seed_flag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Difficulty-aware reasoning-budget toolkit: reward scoring, dataset "
               "curation, policy-training simulation, and report evaluation"};
  app.require_subcommand(1);
  int exit_code = 0;

  CommonArgs score_args, curate_args, sim_args, eval_args;

  auto* score =
      app.add_subcommand("score", "Score rollout groups with the three-part reward");
  std::string groups_file;
  add_common(score, score_args);
  score->add_option("groups", groups_file, "Rollout groups JSONL file");
  score->callback([&]() {
    exit_code = adactrl::cli::run_guarded([&]() {
      const auto config = resolve(score_args);
      if (score_args.print_config) {
        std::cout << config.dump(2) << "\n";
        return 0;
      }
      if (groups_file.empty()) {
        throw adactrl::MalformedInput("missing groups file argument");
      }
      return adactrl::cli::cmd_score(groups_file, config, score_args.out);
    });
  });

  auto* curate = app.add_subcommand(
      "curate", "Build the cold-start SFT dataset and the RL problem pool");
  std::string problems_file, candidates_file;
  add_common(curate, curate_args);
  curate->add_option("--problems", problems_file, "Problems JSONL file");
  curate->add_option("--candidates", candidates_file, "Candidate responses JSONL file");
  curate->callback([&]() {
    exit_code = adactrl::cli::run_guarded([&]() {
      const auto config = resolve(curate_args);
      if (curate_args.print_config) {
        std::cout << config.dump(2) << "\n";
        return 0;
      }
      if (problems_file.empty() || candidates_file.empty()) {
        throw adactrl::MalformedInput("curate requires --problems and --candidates");
      }
      return adactrl::cli::cmd_curate(problems_file, candidates_file, config,
                                      curate_args.out);
    });
  });

  auto* simulate = app.add_subcommand(
      "simulate", "Train the synthetic budget policy and evaluate its modes");
  std::string mode = "all";
  add_common(simulate, sim_args);
  simulate->add_option("--mode", mode,
                       "Evaluation mode: all, adaptive, force-easy or force-hard")
      ->capture_default_str();
  simulate->callback([&]() {
    exit_code = adactrl::cli::run_guarded([&]() {
      const auto config = resolve(sim_args);
      if (sim_args.print_config) {
        std::cout << config.dump(2) << "\n";
        return 0;
      }
      return adactrl::cli::cmd_simulate(config, sim_args.out, mode);
    });
  });

  auto* evaluate =
      app.add_subcommand("evaluate", "Aggregate scored records into reports");
  std::vector<std::string> records_files;
  bool repeats = false;
  add_common(evaluate, eval_args);
  evaluate->add_option("records", records_files, "Records JSONL file(s)");
  evaluate->add_flag("--repeats", repeats,
                     "Treat each input file as one independent run and average them");
  evaluate->callback([&]() {
    exit_code = adactrl::cli::run_guarded([&]() {
      const auto config = resolve(eval_args);
      if (eval_args.print_config) {
        std::cout << config.dump(2) << "\n";
        return 0;
      }
      if (records_files.empty()) {
        throw adactrl::MalformedInput("missing records file argument");
      }
      return adactrl::cli::cmd_evaluate(records_files, repeats, config, eval_args.out);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version exit clean; usage errors are malformed input
  }
  return exit_code;
}
