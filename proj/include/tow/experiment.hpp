#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tow/config.hpp"
#include "tow/learner.hpp"
#include "tow/oracle.hpp"

namespace tow {

/// Everything one realization needs before the first round: a sampled (or
/// pinned) instance and lambda_bar, drawn from seed = base_seed + index.
struct RealizationSetup {
  int index = 0;
  std::uint64_t seed = 0;
  std::shared_ptr<const RewardField> field;
  RandomizedTargets targets;
  std::int64_t attempts = 1;  // draws until the instance filter accepted one
};

std::shared_ptr<const RewardField> make_field(const ExperimentConfig& config, Rng& instance_rng);
RealizationSetup setup_realization(const ExperimentConfig& config, int index);

struct Realization {
  RealizationSetup setup;
  Trace trace;
};

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct AggregateSeries {
  std::string metric;
  std::vector<std::int64_t> t;
  std::vector<double> median;
  std::vector<double> q1;
  std::vector<double> q3;
  std::vector<double> mean;
};

std::vector<AggregateSeries> aggregate(const std::vector<Realization>& runs,
                                       const std::vector<std::string>& metrics);

struct ExperimentResult {
  std::vector<Realization> runs;  // ordered by realization index
  std::vector<AggregateSeries> aggregates;
};

/// Realizations are independent and may run on `config.threads` workers;
/// the result does not depend on completion order.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct RealizationCheck {
  int run_id = 0;
  std::uint64_t seed = 0;
  EquilibriumStatus oracle_status = EquilibriumStatus::kNotConverged;
  Feasibility feasibility = Feasibility::kUnknown;
  ActionProfile equilibrium;
  Vector targets;
  double action_error = 0.0;  // max_n |tail mean x_n - x*_n|
  double reward_error = 0.0;  // max_n |tail mean u_n - lambda_bar_n|
  double tail_min_reward = 0.0;
  std::int64_t resets = 0;
  std::int64_t last_reset_round = -1;
  std::int64_t switches = 0;
  std::int64_t last_switch_round = -1;
  bool boundary_pinned = false;  // final profile has some x_n = B_n
  bool inconclusive = false;
  bool pass = false;
};

struct CrossCheckReport {
  std::vector<RealizationCheck> rows;
  int evaluated = 0;  // excludes inconclusive oracles
  int passed = 0;
  int inconclusive = 0;
  double pass_fraction = 0.0;
  bool ok = false;
};

/// Oracle equilibrium for the final game assignment of each run, compared
/// with tail averages.
CrossCheckReport cross_check(const ExperimentConfig& config, const ExperimentResult& result);
CrossCheckReport cross_check(const ExperimentConfig& config);

struct ValidationSweep {
  RealizationSetup setup;
  GameAssignment games;
  std::vector<ActionProfile> points;
  TowConditionReport report;
};

/// ToW-condition sweep on realization 0's instance: interior points (and,
/// for K > 1, a random assignment) drawn from the validation stream.
ValidationSweep validation_sweep(const ExperimentConfig& config, int n_points = 100);

}  // namespace tow
