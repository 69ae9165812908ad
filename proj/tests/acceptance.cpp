// Acceptance suite: one PASS/FAIL line per criterion.
//
//   tow_acceptance --criterion N     run one criterion (1..11)
//   tow_acceptance                   run all of them
//
// Experiment settings live in configs/*.json, the same files the CLI takes,
// so every number printed here can be regenerated with `tow run`/`tow check`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tow/config.hpp"
#include "tow/csv.hpp"
#include "tow/experiment.hpp"

#ifndef TOW_CONFIG_DIR
#error "TOW_CONFIG_DIR must point at the configs/ directory"
#endif
#ifndef TOW_CLI
#error "TOW_CLI must point at the tow executable"
#endif

namespace fs = std::filesystem;
using namespace tow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string config_path(const std::string& name) { return std::string(TOW_CONFIG_DIR) + "/" + name; }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::int64_t total_attempts(const ExperimentResult& r) {
  std::int64_t n = 0;
  for (const auto& run : r.runs) n += run.setup.attempts;
  return n;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Linear solve vs projected Euler on 50 feasible N = 10 instances.
Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = parse_config(R"({
    "scenario": {"kind": "power_control", "players": 10, "filter": "feasible"},
    "qos": {"lambda": 0.05, "delta": 0.1},
    "run": {"realizations": 50, "seed": 1000}
  })");
  double worst = 0.0;
  int agree = 0;
  std::int64_t attempts = 0;
  for (int r = 0; r < 50; ++r) {
    const auto setup = setup_realization(cfg, r);
    attempts += setup.attempts;
    const auto& field = dynamic_cast<const PowerControlField&>(*setup.field);
    const Vector& lb = setup.targets.lambda_bar;
    const auto lin = power_control_equilibrium_linear(field.instance(), GameAssignment::Zero(10), lb,
                                                      field.bounds());
    const auto ode = integrate_ode(field, GameAssignment::Zero(10), lb, ActionProfile::Zero(10));
    const double err = (lin.profile - ode.terminal).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    if (ode.converged && err <= 1e-6) ++agree;
  }
  const double elapsed = seconds_since(start);
  return {agree == 50 && elapsed < 10.0,
          std::to_string(agree) + "/50 instances agree within 1e-6 (max |x_lin - x_ode| = " +
              fmt(worst, 3) + ", " + std::to_string(attempts) + " draws); runtime " +
              fmt(elapsed, 3) + " s < 10 s"};
}

// 2. Noiseless ToP terminal vs the linear oracle.
Outcome criterion2() {
  const auto cfg = load_config(config_path("criterion2_noiseless_top.json"));
  const auto result = run_experiment(cfg);
  int ok = 0;
  double worst = 0.0;
  for (const auto& run : result.runs) {
    const auto& field = dynamic_cast<const PowerControlField&>(*run.setup.field);
    const auto lin = power_control_equilibrium_linear(field.instance(), run.trace.final_state.games,
                                                      run.setup.targets.lambda_bar, field.bounds());
    const double err = (run.trace.final_state.actions - lin.profile).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    if (lin.status == EquilibriumStatus::kInterior && err < 1e-3) ++ok;
  }
  return {ok == cfg.realizations,
          std::to_string(ok) + "/" + std::to_string(cfg.realizations) +
              " seeds with terminal error < 1e-3 after " + std::to_string(cfg.horizon) +
              " rounds (max error " + fmt(worst, 3) + ")"};
}

// 3 and 6 share the runs.
ExperimentResult fig1b_runs(const ExperimentConfig& cfg, double& elapsed) {
  const auto start = std::chrono::steady_clock::now();
  auto result = run_experiment(cfg);
  elapsed = seconds_since(start);
  return result;
}

Outcome criterion3() {
  const auto cfg = load_config(config_path("criterion3_fig1b.json"));
  double elapsed = 0.0;
  const auto result = fig1b_runs(cfg, elapsed);
  int ok = 0;
  double worst = 0.0;
  for (const auto& run : result.runs) {
    const double err =
        (run.trace.summary.tail_mean_reward - run.trace.targets).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    if (err <= 0.05) ++ok;
  }
  return {ok >= 95 && elapsed < 120.0,
          std::to_string(ok) + "/100 realizations with every tail reward within 0.05 of lambda_bar "
          "(need >= 95; worst " + fmt(worst, 3) + "; " + std::to_string(total_attempts(result)) +
              " draws for 100 feasible instances); runtime " + fmt(elapsed, 3) + " s < 120 s"};
}

Outcome criterion4() {
  const auto cfg = load_config(config_path("criterion4_fig1a.json"));
  const auto result = run_experiment(cfg);
  int ok = 0;
  double lowest = 1e300;
  for (const auto& run : result.runs) {
    const double m = run.trace.summary.tail_mean_min_reward;
    lowest = std::min(lowest, m);
    if (m >= 0.1 - 0.02) ++ok;
  }
  return {ok >= 95, std::to_string(ok) +
                        "/100 realizations with tail min-player reward >= 0.08 (need >= 95; lowest " +
                        fmt(lowest, 4) + "; " + std::to_string(total_attempts(result)) +
                        " draws to find 100 feasible instances)"};
}

Outcome criterion5() {
  const auto cfg = load_config(config_path("criterion5_minimal_fdtop.json"));
  const auto setup = setup_realization(cfg, 0);
  const auto oracle = minimal_equilibrium(*setup.field, GameAssignment::Zero(2), setup.targets.lambda_bar);
  const double hand = 0.05 / 0.9;
  const bool oracle_ok = oracle.status == EquilibriumStatus::kInterior &&
                         (oracle.profile.array() - hand).abs().maxCoeff() < 1e-6;
  const auto result = run_experiment(cfg);
  int ok = 0;
  double worst = 0.0;
  for (const auto& run : result.runs) {
    const double err = (run.trace.final_state.actions.array() - hand).abs().maxCoeff();
    worst = std::max(worst, err);
    if (err <= 0.01) ++ok;
  }
  return {oracle_ok && ok >= 95,
          std::to_string(ok) + "/100 FDToP seeds within 0.01 of x* = (" + fmt(hand, 6) + ", " +
              fmt(hand, 6) + ") (need >= 95; worst " + fmt(worst, 3) + "); ODE oracle x* = " +
              fmt(oracle.profile[0], 8) + (oracle_ok ? "" : " DISAGREES")};
}

Outcome criterion6() {
  const auto cfg = load_config(config_path("criterion3_fig1b.json"));
  double elapsed = 0.0;
  const auto result = fig1b_runs(cfg, elapsed);
  const std::int64_t half = cfg.horizon / 2;
  int ok = 0;
  std::int64_t total_resets = 0, latest = -1;
  for (const auto& run : result.runs) {
    total_resets += run.trace.summary.reset_count;
    latest = std::max(latest, run.trace.summary.last_reset_round);
    if (run.trace.summary.last_reset_round < half) ++ok;
  }
  return {ok >= 95, std::to_string(ok) + "/100 realizations with no reset in rounds [" +
                        std::to_string(half) + ", " + std::to_string(cfg.horizon) +
                        ") (need >= 95; " + std::to_string(total_resets) +
                        " resets in total, latest at round " + std::to_string(latest) + ")"};
}

// Independent re-verification of the split construction over all 2^N assignments.
bool split_holds(const RealizationSetup& setup) {
  const auto& field = dynamic_cast<const PowerControlField&>(*setup.field);
  const int n = field.n_players();
  const Vector& lb = setup.targets.lambda_bar;
  for (int mask = 0; mask < (1 << n); ++mask) {
    GameAssignment g(n);
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += (g[i] = (mask >> i) & 1);
    const bool feasible = power_control_equilibrium_linear(field.instance(), g, lb, field.bounds())
                              .status == EquilibriumStatus::kInterior;
    if ((ones == 0 || ones == n) && feasible) return false;
    if (std::abs(2 * ones - n) <= 1 && !feasible) return false;
  }
  return true;
}

Outcome criterion7() {
  const auto cfg = load_config(config_path("criterion7_metatop_split.json"));
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(cfg);
  const double elapsed = seconds_since(start);
  const std::int64_t half = cfg.horizon / 2;
  int rewards_ok = 0, switches_ok = 0, verified = 0;
  for (const auto& run : result.runs) {
    if (split_holds(run.setup)) ++verified;
    const Vector& tail = run.trace.summary.tail_mean_reward;
    if ((tail.array() >= cfg.qos.lambda.array() - 0.02).all()) ++rewards_ok;
    if (run.trace.summary.last_switch_round < half) ++switches_ok;
  }
  return {verified == 100 && rewards_ok >= 90 && switches_ok >= 90 && elapsed < 300.0,
          "(a) " + std::to_string(rewards_ok) + "/100 with all tail rewards >= lambda - 0.02, (b) " +
              std::to_string(switches_ok) + "/100 with no switch after round " +
              std::to_string(half) + " (need >= 90 each); split verified on " +
              std::to_string(verified) + "/100 instances; runtime " + fmt(elapsed, 3) +
              " s < 300 s"};
}

Outcome criterion8() {
  const auto cfg = load_config(config_path("criterion8_sensor.json"));
  const int draws = 100000;
  int within = 0, checked = 0;
  double worst_ratio = 0.0;
  for (int p = 0; p < 20; ++p) {
    const auto setup = setup_realization(cfg, p);
    const auto& field = dynamic_cast<const SensorActivationField&>(*setup.field);
    const auto& inst = field.instance();
    Rng rng = make_stream(setup.seed, Stream::kValidation);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ActionProfile x(inst.n_sensors());
    for (Eigen::Index n = 0; n < x.size(); ++n) x[n] = unit(rng);
    const Vector exact = sensor_delivery_probability_exact(inst, x);
    Vector mean = Vector::Zero(x.size());
    for (int d = 0; d < draws; ++d) mean += sensor_delivery_estimate(inst, exact, rng);
    mean /= draws;
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      const double bound =
          4.0 * std::sqrt(exact[n] * (1.0 - exact[n]) / (inst.packets_per_round * double(draws)));
      const double dev = std::abs(mean[n] - exact[n]);
      ++checked;
      if (dev <= bound) ++within;
      if (bound > 0.0) worst_ratio = std::max(worst_ratio, dev / bound);
    }
  }
  return {within == checked, std::to_string(within) + "/" + std::to_string(checked) +
                                 " (profile, sensor) means within 4 sd of exact P_n over " +
                                 std::to_string(draws) + " draws (worst |dev|/bound " +
                                 fmt(worst_ratio, 3) + ")"};
}

Outcome criterion9() {
  bool all = true;
  std::string detail;
  for (const char* name : {"criterion9_power.json", "criterion9_task.json", "criterion9_sensor.json"}) {
    const auto cfg = load_config(config_path(name));
    const auto sweep = validation_sweep(cfg, 100);
    const auto& r = sweep.report;
    all = all && r.ok();
    detail += to_string(cfg.scenario.kind) + ": same-game >= 0: " +
              std::to_string(r.same_game_violations) + "/" + std::to_string(r.same_game_pairs) +
              " (> tol: " + std::to_string(r.same_game_increasing) + "), cross-game |d| > 1e-6: " +
              std::to_string(r.cross_game_violations) + "/" + std::to_string(r.cross_game_pairs) +
              "; ";
  }
  return {all, detail + "over 100 interior points each"};
}

Outcome criterion10() {
  ExperimentConfig cfg = parse_config(R"({
    "scenario": {"kind": "power_control", "players": 10, "filter": "feasible"},
    "qos": {"lambda": 0.1},
    "run": {"realizations": 20, "seed": 10000}
  })");
  OdeOptions opt;
  opt.record_stride = 1;
  opt.max_time = 20.0;
  opt.tol = 0.0;  // same grid for both starts
  int ordered = 0;
  std::int64_t grid_points = 0;
  for (int r = 0; r < 20; ++r) {
    const auto setup = setup_realization(cfg, r);
    const RewardField& field = *setup.field;
    const Vector& lb = setup.targets.lambda_bar;
    Rng rng = make_stream(setup.seed, Stream::kValidation);
    std::uniform_real_distribution<double> unit(0.0, 0.5);
    ActionProfile lo(10), hi(10);
    for (int n = 0; n < 10; ++n) {
      lo[n] = unit(rng);
      hi[n] = lo[n] + unit(rng);
    }
    const GameAssignment g = GameAssignment::Zero(10);
    const auto from_zero = integrate_ode(field, g, lb, ActionProfile::Zero(10), opt);
    const auto a = integrate_ode(field, g, lb, lo, opt);
    const auto b = integrate_ode(field, g, lb, hi, opt);
    bool ok = a.profiles.size() == b.profiles.size() && a.profiles.size() == from_zero.profiles.size();
    for (std::size_t i = 0; ok && i < a.profiles.size(); ++i) {
      ok = (from_zero.profiles[i].array() <= a.profiles[i].array() + 1e-12).all() &&
           (a.profiles[i].array() <= b.profiles[i].array() + 1e-12).all();
    }
    grid_points += static_cast<std::int64_t>(a.profiles.size());
    if (ok) ++ordered;
  }
  return {ordered == 20, std::to_string(ordered) +
                             "/20 instances keep 0 <= x0 <= x0' trajectories ordered at all " +
                             std::to_string(grid_points) + " grid points (slack 1e-12)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome criterion11() {
  const fs::path root = fs::temp_directory_path() / "tow_determinism";
  fs::remove_all(root);
  struct Command {
    std::string verb, config, extra_a, extra_b;
  };
  const std::vector<Command> commands{
      {"run", "criterion2_noiseless_top.json", "", ""},
      {"run", "criterion3_fig1b.json", "", ""},
      {"check", "criterion5_minimal_fdtop.json", "", ""},
      {"run", "criterion7_metatop_split.json", "--realizations 4 --threads 1", "--realizations 4 --threads 3"},
      {"run", "criterion8_sensor.json", "--realizations 4", "--realizations 4"},
      {"oracle", "criterion4_fig1a.json", "--realizations 5", "--realizations 5"},
      {"validate", "criterion9_sensor.json", "", ""},
      {"validate", "criterion9_task.json", "", ""},
  };
  int identical = 0, compared = 0;
  std::string mismatches;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const auto& cmd = commands[c];
    const fs::path dirs[2] = {root / (std::to_string(c) + "a"), root / (std::to_string(c) + "b")};
    for (int k = 0; k < 2; ++k) {
      const std::string line = std::string(TOW_CLI) + " " + cmd.verb + " --config " +
                               config_path(cmd.config) + " --out " + dirs[k].string() + " " +
                               (k == 0 ? cmd.extra_a : cmd.extra_b) + " > /dev/null";
      const int status = std::system(line.c_str());
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      if (code != 0 && code != 3) return {false, "command failed (" + std::to_string(code) + "): " + line};
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      const fs::path twin = dirs[1] / entry.path().filename();
      if (fs::exists(twin) && slurp(entry.path()) == slurp(twin)) {
        ++identical;
      } else {
        mismatches += " " + cmd.config + ":" + entry.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  return {compared > 0 && identical == compared,
          std::to_string(identical) + "/" + std::to_string(compared) +
              " CSV files byte-identical across reruns of " + std::to_string(commands.size()) +
              " commands (thread count varied for Meta-ToP)" +
              (mismatches.empty() ? "" : "; differing:" + mismatches)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
      {"oracle consistency (power control)", criterion1},
      {"noiseless exactness", criterion2},
      {"N=4 heterogeneous QoS reproduction", criterion3},
      {"N=50 min-player reward", criterion4},
      {"minimal-equilibrium selection (FDToP)", criterion5},
      {"finite resets", criterion6},
      {"Meta-ToP convergence and finite switching", criterion7},
      {"sensor feedback unbiasedness", criterion8},
      {"ToW-condition sweep", criterion9},
      {"ODE monotonicity", criterion10},
      {"determinism", criterion11},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && id != only) continue;
    const auto& [name, fn] = criteria()[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    all_pass = all_pass && out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): "
              << out.detail << " [" << fmt(seconds_since(start), 3) << " s]" << std::endl;
  }
  return all_pass ? 0 : 1;
}
