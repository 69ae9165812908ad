#include "tow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace tow {

namespace {

constexpr double kMaxEnumeratedAssignments = 1 << 20;

bool feasible(const RewardField& field, const GameAssignment& games, const Vector& targets) {
  return check_feasibility(field, games, targets).verdict == Feasibility::kFeasible;
}

// Calls visit(g) for every assignment in {0..K-1}^N until it returns false.
template <typename Visit>
bool for_each_assignment(int n_players, int n_games, Visit&& visit) {
  if (std::pow(static_cast<double>(n_games), n_players) > kMaxEnumeratedAssignments) {
    throw std::invalid_argument("instance filter: K^N = " + std::to_string(n_games) + "^" +
                                std::to_string(n_players) + " assignments is too many to enumerate");
  }
  GameAssignment g = GameAssignment::Zero(n_players);
  while (true) {
    if (!visit(g)) return false;
    int i = 0;
    while (i < n_players && ++g[i] == n_games) g[i++] = 0;
    if (i == n_players) return true;
  }
}

bool balanced(const GameAssignment& g, int n_games) {
  std::vector<int> counts(n_games, 0);
  for (Eigen::Index n = 0; n < g.size(); ++n) ++counts[g[n]];
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  return *hi - *lo <= 1;
}

bool accepted(const ExperimentConfig& config, const RewardField& field, const Vector& targets) {
  const int n = field.n_players();
  const int k = field.n_games();
  switch (config.scenario.filter) {
    case InstanceFilter::kNone:
      return true;
    case InstanceFilter::kFeasible:
      if (k == 1) return feasible(field, GameAssignment::Zero(n), targets);
      // Some assignment works.
      return !for_each_assignment(n, k, [&](const GameAssignment& g) {
        return !feasible(field, g, targets);
      });
    case InstanceFilter::kSplit: {
      for (int g = 0; g < k; ++g) {
        if (feasible(field, GameAssignment::Constant(n, g), targets)) return false;
      }
      return for_each_assignment(n, k, [&](const GameAssignment& g) {
        return !balanced(g, k) || feasible(field, g, targets);
      });
    }
  }
  return true;
}

}  // namespace

std::shared_ptr<const RewardField> make_field(const ExperimentConfig& config, Rng& instance_rng) {
  const ScenarioConfig& sc = config.scenario;
  const Bounds bounds = Bounds::uniform(sc.players, sc.bound);
  switch (sc.kind) {
    case ScenarioKind::kPowerControl: {
      PowerControlInstance instance =
          sc.power ? *sc.power : gen_power_control(sc.players, instance_rng);
      instance.noise_floor = sc.noise_floor;
      return std::make_shared<PowerControlField>(std::move(instance), sc.games, bounds);
    }
    case ScenarioKind::kTaskAllocation: {
      TaskAllocationInstance instance =
          sc.task ? *sc.task : gen_task_allocation(sc.players, sc.games, instance_rng);
      return std::make_shared<TaskAllocationField>(std::move(instance), bounds);
    }
    case ScenarioKind::kSensorActivation: {
      SensorNetworkInstance instance =
          sc.sensor ? *sc.sensor : gen_sensor_network(sc.players, sc.edge_prob, instance_rng);
      instance.packets_per_round = sc.packets;
      instance.value_scale = sc.value_scale;
      instance.offset = sc.offset;
      instance.energy_weight = sc.energy_weight;
      return std::make_shared<SensorActivationField>(std::move(instance), bounds);
    }
  }
  throw std::logic_error("unhandled scenario kind");
}

RealizationSetup setup_realization(const ExperimentConfig& config, int index) {
  RealizationSetup setup;
  setup.index = index;
  setup.seed = config.seed + static_cast<std::uint64_t>(index);
  Rng instance_rng = make_stream(setup.seed, Stream::kInstance);
  Rng targets_rng = make_stream(setup.seed, Stream::kTargets);
  for (setup.attempts = 1;; ++setup.attempts) {
    setup.field = make_field(config, instance_rng);
    setup.targets = config.lambda_bar ? RandomizedTargets{*config.lambda_bar}
                                      : sample_targets(config.qos, targets_rng);
    if (accepted(config, *setup.field, setup.targets.lambda_bar)) return setup;
    if (setup.attempts >= config.scenario.max_attempts) {
      throw std::runtime_error("no instance passed filter '" + to_string(config.scenario.filter) +
                               "' in " + std::to_string(setup.attempts) + " attempts");
    }
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<AggregateSeries> aggregate(const std::vector<Realization>& runs,
                                       const std::vector<std::string>& metrics) {
  std::vector<AggregateSeries> out;
  if (runs.empty()) return out;
  const std::size_t rounds = runs.front().trace.records.size();
  for (const auto& run : runs) {
    if (run.trace.records.size() != rounds) {
      throw std::invalid_argument("aggregate: realizations recorded different rounds");
    }
  }
  const int n_players = runs.front().setup.field->n_players();

  auto build = [&](const std::string& name, auto&& metric) {
    AggregateSeries s;
    s.metric = name;
    std::vector<double> sample(runs.size());
    for (std::size_t i = 0; i < rounds; ++i) {
      for (std::size_t r = 0; r < runs.size(); ++r) sample[r] = metric(runs[r].trace.records[i]);
      s.t.push_back(runs.front().trace.records[i].t);
      s.median.push_back(quantile(sample, 0.5));
      s.q1.push_back(quantile(sample, 0.25));
      s.q3.push_back(quantile(sample, 0.75));
      double sum = 0.0;
      for (double v : sample) sum += v;
      s.mean.push_back(sum / static_cast<double>(sample.size()));
    }
    out.push_back(std::move(s));
  };

  for (const auto& m : metrics) {
    if (m == "min_reward") {
      build(m, [](const RoundRecord& rec) { return rec.clean_reward.minCoeff(); });
    } else if (m == "total_action") {
      build(m, [](const RoundRecord& rec) { return rec.actions.sum(); });
    } else if (m == "reward") {
      for (int n = 0; n < n_players; ++n) {
        build("reward_" + std::to_string(n + 1),
              [n](const RoundRecord& rec) { return rec.clean_reward[n]; });
      }
    } else {
      throw std::invalid_argument("aggregate: unknown metric '" + m + "'");
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int total = config.realizations;
  std::vector<Realization> runs(total);
  std::vector<std::exception_ptr> errors(total);

  SimulationOptions options;
  options.horizon = config.horizon;
  options.record_stride = config.record_stride;
  options.tail_fraction = config.tail_fraction;
  options.switching = config.switching;

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < total; r = next++) {
      try {
        runs[r].setup = setup_realization(config, r);
        runs[r].trace = run_simulation(config.algorithm, *runs[r].setup.field,
                                       runs[r].setup.targets, config.schedule, config.noise,
                                       options, runs[r].setup.seed);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const int n_threads = std::min(config.threads, total);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int r = 0; r < total; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const std::exception& e) {
      throw std::runtime_error("realization " + std::to_string(r) + ": " + e.what());
    }
  }

  ExperimentResult result;
  result.runs = std::move(runs);
  result.aggregates = aggregate(result.runs, config.metrics);
  return result;
}

ValidationSweep validation_sweep(const ExperimentConfig& config, int n_points) {
  ValidationSweep sweep;
  sweep.setup = setup_realization(config, 0);
  const RewardField& field = *sweep.setup.field;
  Rng rng = make_stream(sweep.setup.seed, Stream::kValidation);
  sweep.games = GameAssignment::Zero(field.n_players());
  if (field.n_games() > 1) {
    std::uniform_int_distribution<int> pick(0, field.n_games() - 1);
    for (int n = 0; n < field.n_players(); ++n) sweep.games[n] = pick(rng);
  }
  sweep.points = sample_interior_points(field.bounds(), n_points, rng);
  sweep.report = check_tow_condition(field, sweep.games, sweep.points);
  return sweep;
}

}  // namespace tow
