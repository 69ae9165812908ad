#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tow/learner.hpp"
#include "tow/scenarios.hpp"

namespace tow {

enum class ScenarioKind { kPowerControl, kTaskAllocation, kSensorActivation };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

// Which sampled instances a realization accepts. Rejected draws are
// redrawn from the same streams and counted.
enum class InstanceFilter {
  kNone,
  kFeasible,  // K = 1: the single game is feasible; K >= 2: some assignment is
  kSplit,     // every all-in-one-game assignment infeasible, every balanced one feasible
};

std::string to_string(InstanceFilter filter);
InstanceFilter instance_filter_from_string(const std::string& name);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kPowerControl;
  int players = 4;
  int games = 1;
  double bound = 1.0;
  // power control
  double noise_floor = 0.1;
  // sensor activation
  double edge_prob = 0.2;
  int packets = 100;
  double value_scale = 0.8;
  double offset = 0.8;
  double energy_weight = 2.0;

  InstanceFilter filter = InstanceFilter::kNone;
  std::int64_t max_attempts = 1000000;

  // Pinned instances replace the per-realization draw.
  std::optional<PowerControlInstance> power;
  std::optional<TaskAllocationInstance> task;
  std::optional<SensorNetworkInstance> sensor;
};

struct CheckThresholds {
  double action_tol = 1e-3;
  double reward_tol = 0.05;
  double min_pass_fraction = 0.95;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  Algorithm algorithm = Algorithm::kToP;
  SwitchProbabilities switching;
  StepsizeSchedule schedule;
  NoiseModel noise = NoiseModel::gaussian(0.1);
  QoSTargets qos{Vector::Constant(4, 0.1), 0.01};
  std::optional<Vector> lambda_bar;

  std::int64_t horizon = 100000;
  int realizations = 100;
  std::uint64_t seed = 1;
  std::int64_t record_stride = 1;
  double tail_fraction = 0.1;
  int threads = 1;

  std::string output_dir = "out";
  bool write_traces = true;
  std::vector<std::string> metrics{"min_reward", "total_action"};

  CheckThresholds check;

  void validate() const;
};

/// JSON text -> validated config with defaults resolved. Errors carry the
/// offending field path, e.g. "run.realizations: must be >= 1".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Fully resolved JSON; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tow
