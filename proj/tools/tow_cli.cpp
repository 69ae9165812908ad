// Command-line front end: run, oracle, check, validate.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tow/config.hpp"
#include "tow/csv.hpp"
#include "tow/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheckFailed = 3;

constexpr int kValidationPoints = 100;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> realizations;
  std::optional<int> threads;
};

tow::ExperimentConfig load(const Overrides& o) {
  tow::ExperimentConfig config = tow::load_config(o.config_path);
  if (o.seed) config.seed = *o.seed;
  if (o.out) config.output_dir = *o.out;
  if (o.realizations) config.realizations = *o.realizations;
  if (o.threads) config.threads = *o.threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw tow::ConfigError(e.what());
  }
  return config;
}

std::string output_path(const tow::ExperimentConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.output_dir);
  return (std::filesystem::path(config.output_dir) / name).string();
}

void write_run_outputs(const tow::ExperimentConfig& config, const tow::ExperimentResult& result) {
  tow::write_file(output_path(config, "config.json"), tow::serialize_config(config));
  if (config.write_traces) {
    tow::write_file(output_path(config, "traces.csv"), tow::format_traces_csv(result.runs));
  }
  tow::write_file(output_path(config, "aggregate.csv"),
                  tow::format_aggregate_csv(result.aggregates));
  tow::write_file(output_path(config, "aggregate_mean.csv"),
                  tow::format_aggregate_mean_csv(result.aggregates));
}

int cmd_run(const tow::ExperimentConfig& config) {
  const auto result = tow::run_experiment(config);
  write_run_outputs(config, result);
  std::int64_t attempts = 0;
  for (const auto& run : result.runs) attempts += run.setup.attempts;
  std::cout << "run: " << result.runs.size() << " realizations, " << config.horizon
            << " rounds, " << attempts << " instance draws; output in " << config.output_dir
            << "\n";
  return kExitOk;
}

// Default assignment when no run has chosen one: players dealt round-robin.
tow::GameAssignment round_robin(int n_players, int n_games) {
  tow::GameAssignment g(n_players);
  for (int n = 0; n < n_players; ++n) g[n] = n % n_games;
  return g;
}

int cmd_oracle(const tow::ExperimentConfig& config) {
  std::vector<tow::RealizationSetup> setups;
  std::vector<tow::GameAssignment> assignments;
  std::vector<tow::EquilibriumReport> reports;
  int feasible = 0;
  for (int r = 0; r < config.realizations; ++r) {
    auto setup = tow::setup_realization(config, r);
    const auto& field = *setup.field;
    auto games = round_robin(field.n_players(), field.n_games());
    auto verdict = tow::check_feasibility(field, games, setup.targets.lambda_bar);
    if (verdict.verdict == tow::Feasibility::kFeasible) ++feasible;
    setups.push_back(std::move(setup));
    assignments.push_back(std::move(games));
    reports.push_back(std::move(verdict.report));
  }
  tow::write_file(output_path(config, "oracle.csv"),
                  tow::format_oracle_csv(setups, assignments, reports));
  std::cout << "oracle: " << feasible << "/" << config.realizations
            << " realizations with an interior equilibrium\n";
  return kExitOk;
}

int cmd_check(const tow::ExperimentConfig& config) {
  const auto result = tow::run_experiment(config);
  write_run_outputs(config, result);
  const auto report = tow::cross_check(config, result);
  tow::write_file(output_path(config, "check.csv"), tow::format_check_csv(report));
  int pinned = 0;
  for (const auto& row : report.rows) pinned += row.boundary_pinned ? 1 : 0;
  std::cout << "check: " << report.passed << "/" << report.evaluated << " passed ("
            << report.inconclusive << " inconclusive, " << pinned
            << " boundary-pinned), pass fraction " << tow::format_real(report.pass_fraction)
            << ", required " << tow::format_real(config.check.min_pass_fraction) << ": "
            << (report.ok ? "PASS" : "FAIL") << "\n";
  return report.ok ? kExitOk : kExitCheckFailed;
}

int cmd_validate(const tow::ExperimentConfig& config) {
  const auto sweep = tow::validation_sweep(config, kValidationPoints);
  const auto& report = sweep.report;
  const auto& points = sweep.points;

  std::string csv = "point,player,perturbed,same_game,partial\n";
  for (const auto& p : report.partials) {
    csv += std::to_string(p.point) + ',' + std::to_string(p.n + 1) + ',' +
           std::to_string(p.m + 1) + ',' + (p.same_game ? "1" : "0") + ',' +
           tow::format_real(p.estimate) + '\n';
  }
  tow::write_file(output_path(config, "validate.csv"), csv);

  std::cout << "validate: " << tow::to_string(config.scenario.kind) << ", " << points.size()
            << " points, " << report.same_game_pairs << " same-game and "
            << report.cross_game_pairs << " cross-game partials\n"
            << "  same-game partials >= 0:       " << report.same_game_violations << "\n"
            << "  same-game partials > tol:      " << report.same_game_increasing << "\n"
            << "  cross-game |partial| > tol:    " << report.cross_game_violations << "\n"
            << "  " << (report.ok() ? "PASS" : "FAIL") << "\n";
  return report.ok() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tug-of-War learning simulator"};
  app.require_subcommand(1);

  Overrides o;
  auto add_flags = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON experiment config")->required();
    sub->add_option("--seed", o.seed, "base seed (realization r uses seed + r)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--realizations", o.realizations, "number of realizations");
    sub->add_option("--threads", o.threads, "worker threads");
  };
  auto* run = app.add_subcommand("run", "run an experiment and write traces and aggregates");
  auto* oracle = app.add_subcommand("oracle", "equilibrium report for each sampled instance");
  auto* check = app.add_subcommand("check", "run, then compare tail averages with the oracle");
  auto* validate = app.add_subcommand("validate", "finite-difference sweep of the ToW condition");
  for (auto* sub : {run, oracle, check, validate}) add_flags(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  tow::ExperimentConfig config;
  try {
    config = load(o);
  } catch (const tow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(config);
    if (oracle->parsed()) return cmd_oracle(config);
    if (check->parsed()) return cmd_check(config);
    return cmd_validate(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
