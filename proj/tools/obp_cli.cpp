// obp: run, generate, report and sweep online persuasion experiments.
//
// Exit codes: 0 success, 2 config error, 3 instance validation error,
// 4 solver failure.

#include "obp/harness/experiment.hpp"
#include "obp/harness/generate.hpp"
#include "obp/harness/instance_io.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

enum Exit { kOk = 0, kConfig = 2, kInstance = 3, kSolver = 4 };

void apply_overrides(obp::ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::string& out, const std::vector<std::string>& features,
                     const std::optional<long>& horizon) {
  if (seed)
    cfg.seed = *seed;
  if (!out.empty())
    cfg.output = out;
  if (horizon)
    cfg.horizon = *horizon;
  for (const auto& f : features) {
    if (f != "dual-ellipsoid")
      throw obp::ConfigError("unknown feature '" + f + "'");
    cfg.dual_ellipsoid = true;
  }
  obp::validate_config(cfg);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online Bayesian persuasion experiments"};
  app.require_subcommand(1);

  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<long> horizon;
  std::vector<std::string> features;

  auto* run = app.add_subcommand("run", "Run one experiment and write rounds.csv / summary.json");
  run->add_option("--config", config_path, "Experiment config JSON")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Output directory (overrides the config)");
  run->add_option("--horizon", horizon, "Override the horizon T");
  run->add_option("--feature", features, "Optional features (dual-ellipsoid)");

  obp::GeneratorParams gp;
  std::string sender = "tensor", params_path;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("generate", "Generate a random persuasion instance");
  gen->add_option("--config", params_path, "Generator parameters JSON (overrides the flags)");
  gen->add_option("--n", gp.n, "Receivers");
  gen->add_option("--states", gp.states, "States of nature");
  gen->add_option("--actions", gp.actions, "Actions per receiver");
  gen->add_option("--types", gp.types, "Types per receiver");
  gen->add_option("--sender", sender, "tensor | anonymous | supermodular | table");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", out, "Instance file (stdout if omitted)");

  std::string run_dir;
  auto* rep = app.add_subcommand("report", "Recompute the regret summary of a run directory");
  rep->add_option("dir", run_dir, "Run directory")->required();

  std::vector<long> horizons;
  int seed_count = 1;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  auto* sw = app.add_subcommand("sweep", "Grid over horizons and seeds");
  sw->add_option("--config", config_path, "Experiment config JSON")->required();
  sw->add_option("--horizons", horizons, "Horizons T")->delimiter(',')->required();
  sw->add_option("--seeds", seed_count, "Number of seeds, starting at the config seed");
  sw->add_option("--seed", seed, "First seed (overrides the config)");
  sw->add_option("--out", out, "Output directory");
  sw->add_option("--threads", threads, "Concurrent cells");
  sw->add_option("--feature", features, "Optional features (dual-ellipsoid)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      obp::ExperimentConfig cfg = obp::load_config(config_path);
      apply_overrides(cfg, seed, out, features, horizon);
      const obp::RunResult r = obp::run_experiment(cfg);
      std::cout << r.summary.dump(2) << '\n';
    } else if (*gen) {
      if (!params_path.empty()) {
        gp = obp::generator_params_from_json(obp::read_json_file(params_path));
      } else {
        gp.sender = obp::parse_sender_model(sender);
      }
      const obp::PersuasionInstance inst = obp::generate_instance(gp, gen_seed);
      const std::string text = obp::instance_to_json(inst).dump(2) + '\n';
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out);
        if (!f)
          throw obp::ConfigError("cannot write '" + out + "'");
        f << text;
      }
    } else if (*rep) {
      std::cout << obp::regret_summary_to_json(obp::report_run(run_dir)).dump(2) << '\n';
    } else if (*sw) {
      obp::ExperimentConfig cfg = obp::load_config(config_path);
      apply_overrides(cfg, seed, "", features, std::nullopt);
      if (seed_count < 1)
        throw obp::ConfigError("--seeds must be positive");
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < seed_count; ++i)
        seeds.push_back(cfg.seed + static_cast<std::uint64_t>(i));
      const obp::SweepResult r = obp::sweep(cfg, horizons, seeds, out, threads);
      std::cout << r.summary.dump(2) << '\n';
    }
  } catch (const obp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const obp::ParamError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfig;
  } catch (const obp::InstanceValidationError& e) {
    std::cerr << "invalid instance: " << e.what() << '\n';
    return kInstance;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
