// Command-line front end: run, sweep, analyze, check.
//
// Exit codes: 0 success, 2 validation failure, 1 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gold/gold.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 1;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gold::runtime_error("cannot write " + path);
  return out;
}

std::string meta_path(const std::string& trace_path) { return trace_path + ".meta.json"; }

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& out_path) {
  const json raw = gold::read_json_file(config_path);
  const fs::path base_dir = fs::absolute(config_path).parent_path();
  const gold::ExperimentConfig cfg = gold::parse_config(raw, base_dir);
  const gold::RunTrace trace = gold::run_experiment(cfg, seed);
  gold::write_trace(out_path, trace);

  // Sidecar so `analyze` can rebuild the game and schedules without flags.
  json meta{{"seed", seed}, {"config", raw}, {"config_dir", base_dir.string()}};
  open_output(meta_path(out_path)) << meta.dump(2) << '\n';
  std::cerr << "wrote " << trace.rows.size() << " rows to " << out_path << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path, const std::string& out_path) {
  const gold::ExperimentConfig cfg = gold::load_config(config_path);
  const auto grid = gold::read_grid(grid_path);
  const auto rows = gold::run_sweep(cfg, grid);
  auto out = open_output(out_path);
  gold::write_sweep(out, rows);
  std::cerr << "wrote " << rows.size() << " grid rows to " << out_path << '\n';
  return 0;
}

int cmd_analyze(const std::string& trace_path, const std::string& out_path, std::string config_path) {
  const gold::RunTrace trace = gold::read_trace(trace_path);
  gold::ExperimentConfig cfg;
  std::string run_id = fs::path(trace_path).stem().string();
  if (!config_path.empty()) {
    cfg = gold::load_config(config_path);
  } else {
    const json meta = gold::read_json_file(meta_path(trace_path));
    cfg = gold::parse_config(meta.at("config"), meta.at("config_dir").get<std::string>());
    run_id = "seed" + std::to_string(meta.at("seed").get<std::uint64_t>());
  }
  if (!trace.complete()) {
    throw gold::validation_error("analyze needs an unthinned trace (outputs.thin = 1)");
  }
  if (auto bad = gold::replay_heads_mismatch(trace)) {
    throw gold::runtime_error("trace replay disagrees with recorded heads at t=" + std::to_string(*bad));
  }
  std::vector<gold::GoldSchedules> schedules;
  for (const auto& p : cfg.players) schedules.push_back(p.schedules);
  const auto rows = gold::analyze_trace(trace, cfg.game, schedules, run_id);
  auto out = open_output(out_path);
  gold::write_metrics(out, rows);
  return 0;
}

int cmd_check(const std::string& config_path) {
  const json raw = gold::read_json_file(config_path);
  // parse_config throws on INVALID regions; report every player's verdict
  // before that happens.
  try {
    const gold::ExperimentConfig cfg =
        gold::parse_config(raw, fs::absolute(config_path).parent_path());
    for (std::size_t i = 0; i < cfg.players.size(); ++i) {
      const auto& p = cfg.players[i];
      std::cout << "player " << i << ": " << gold::to_string(p.verdict.region) << " (b=" << p.schedules.b
                << ", c=" << p.schedules.c << ", alpha=" << p.schedules.alpha << ")\n";
    }
    return 0;
  } catch (const gold::Error& e) {
    if (e.kind() == gold::ErrorKind::Validation) std::cout << "INVALID: " << e.what() << '\n';
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit online learning with delayed rewards: simulation and analysis"};
  app.require_subcommand(1);

  std::string config, out, grid, trace, analyze_config;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Simulate one seed and write the trace CSV");
  run->add_option("--config", config, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Random seed")->required();
  run->add_option("--out", out, "Trace CSV path")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a (b, c, alpha, T) grid over the config's seeds");
  sweep->add_option("--config", config)->required();
  sweep->add_option("--grid", grid, "Grid CSV with header b,c,alpha,T")->required();
  sweep->add_option("--out", out, "Sweep table CSV path")->required();

  auto* analyze = app.add_subcommand("analyze", "Compute regret, distance and series metrics for a trace");
  analyze->add_option("--trace", trace)->required();
  analyze->add_option("--out", out, "Metrics CSV path")->required();
  analyze->add_option("--config", analyze_config, "Config (defaults to the trace's .meta.json sidecar)");

  auto* check = app.add_subcommand("check", "Validate a config and print the parameter region");
  check->add_option("--config", config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*run) return cmd_run(config, seed, out);
    if (*sweep) return cmd_sweep(config, grid, out);
    if (*analyze) return cmd_analyze(trace, out, analyze_config);
    if (*check) return cmd_check(config);
  } catch (const gold::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == gold::ErrorKind::Validation ? kExitValidation : kExitRuntime;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
