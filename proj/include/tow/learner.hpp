#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tow/game.hpp"

namespace tow {

/// eta(t) = scale / (t + offset)^exponent.
class StepsizeSchedule {
 public:
  StepsizeSchedule() : StepsizeSchedule(1.0, 100.0, 1.0) {}
  StepsizeSchedule(double scale, double offset, double exponent);

  double operator()(std::int64_t t) const;

  double scale() const { return scale_; }
  double offset() const { return offset_; }
  double exponent() const { return exponent_; }

 private:
  double scale_;
  double offset_;
  double exponent_;
};

inline double stepsize(const StepsizeSchedule& schedule, std::int64_t t) { return schedule(t); }

struct NoiseModel {
  enum class Kind { kNone, kGaussian, kTruncatedGaussian, kBinomialFeedback };

  Kind kind = Kind::kNone;
  double sigma = 0.0;
  double clip = 0.0;  // M-hat, truncated-gaussian only

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma) { return {Kind::kGaussian, sigma, 0.0}; }
  static NoiseModel truncated_gaussian(double sigma, double clip) {
    return {Kind::kTruncatedGaussian, sigma, clip};
  }
  static NoiseModel binomial_feedback() { return {Kind::kBinomialFeedback, 0.0, 0.0}; }

  void validate() const;

  /// y = u + M for additive kinds; the field's own estimator otherwise.
  Vector observe(const RewardField& field, const GameAssignment& games,
                 const ActionProfile& actions, const Vector& clean, Rng& rng) const;
};

std::string to_string(NoiseModel::Kind kind);
NoiseModel::Kind noise_kind_from_string(const std::string& name);

/// One player's view of the joint learner state.
struct PlayerRuntime {
  double action = 0.0;
  int game = 0;
  double target = 0.0;
  double bound = 1.0;
};

struct LearnerState {
  ActionProfile actions;
  GameAssignment games;
  Vector targets;  // lambda_bar
  Vector bounds;   // B_n

  int n_players() const { return static_cast<int>(actions.size()); }
  PlayerRuntime player(int n) const { return {actions[n], games[n], targets[n], bounds[n]}; }

  static LearnerState initial(const RandomizedTargets& targets, const Bounds& bounds,
                              GameAssignment games);
};

struct SwitchProbabilities {
  double rho = 0.2;  // after receiving s
  double phi = 0.1;  // after receiving only r

  void validate() const;
};

struct RoundEvents {
  std::vector<int> boundary_hitters;
  std::vector<int> s_recipients;
  bool r_broadcast = false;
  std::vector<std::pair<int, int>> switches;  // (player, new game)
  bool resets_applied = false;
};

struct RoundOutcome {
  LearnerState next;
  RoundEvents events;
  Vector clean_reward;     // u(g(t), x(t))
  Vector observed_reward;  // y(t)
};

/// Tug-of-Peace: any boundary hit resets every player to 0.
RoundOutcome top_round(const LearnerState& state, const RewardField& field,
                       const StepsizeSchedule& schedule, const NoiseModel& noise,
                       std::int64_t t, Rng& noise_rng);

/// Fully distributed variant: projection only, no signals.
RoundOutcome fdtop_round(const LearnerState& state, const RewardField& field,
                         const StepsizeSchedule& schedule, const NoiseModel& noise,
                         std::int64_t t, Rng& noise_rng);

/// Meta Tug-of-Peace over K >= 2 games.
RoundOutcome metatop_round(const LearnerState& state, const RewardField& field,
                           const StepsizeSchedule& schedule, const NoiseModel& noise,
                           const SwitchProbabilities& switching, std::int64_t t,
                           Rng& noise_rng, Rng& switch_rng);

enum class Algorithm { kToP, kFDToP, kMetaToP };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct RoundRecord {
  std::int64_t t = 0;
  ActionProfile actions;
  GameAssignment games;
  Vector clean_reward;
  Vector observed_reward;
  bool reset = false;
  Eigen::Array<bool, Eigen::Dynamic, 1> switched;
};

// Whole-horizon bookkeeping that does not depend on the record stride.
struct TraceSummary {
  std::int64_t tail_begin = 0;  // first round of the averaging window
  Vector tail_mean_actions;
  Vector tail_mean_reward;
  double tail_mean_min_reward = 0.0;
  std::int64_t reset_count = 0;
  std::int64_t last_reset_round = -1;
  std::int64_t switch_count = 0;  // rounds with at least one switch
  std::int64_t last_switch_round = -1;
};

struct Trace {
  std::uint64_t seed = 0;
  std::string fingerprint;
  Algorithm algorithm = Algorithm::kToP;
  Vector targets;
  std::int64_t horizon = 0;
  std::vector<RoundRecord> records;
  LearnerState final_state;
  TraceSummary summary;
};

struct SimulationOptions {
  std::int64_t horizon = 100000;
  std::int64_t record_stride = 1;
  double tail_fraction = 0.1;
  SwitchProbabilities switching;
  std::optional<GameAssignment> initial_games;  // Meta-ToP default: uniform draw
};

/// Runs `horizon` rounds from x(0) = 0. Noise, switching and initial game
/// draws come from sub-streams of `seed`.
Trace run_simulation(Algorithm algorithm, const RewardField& field,
                     const RandomizedTargets& targets, const StepsizeSchedule& schedule,
                     const NoiseModel& noise, const SimulationOptions& options,
                     std::uint64_t seed);

}  // namespace tow
