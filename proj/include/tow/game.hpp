#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "tow/random.hpp"
#include "tow/types.hpp"

namespace tow {

/// An evaluatable Meta-ToW game: (g, x) -> u(g, x).
///
/// Implementations are deterministic and immutable once built, so one
/// instance may be shared read-only by concurrent realizations.
class RewardField {
 public:
  virtual ~RewardField() = default;

  virtual int n_players() const = 0;
  virtual int n_games() const = 0;
  virtual const Bounds& bounds() const = 0;
  virtual std::string kind() const = 0;

  virtual Vector evaluate(const GameAssignment& games,
                          const ActionProfile& actions) const = 0;

  /// True when the scenario defines its own noisy observation of u
  /// (the sensor network's packet-count estimator).
  virtual bool has_structural_feedback() const { return false; }
  virtual Vector sample_feedback(const GameAssignment& games,
                                 const ActionProfile& actions, Rng& rng) const;
};

template <typename Scalar>
Scalar project(Scalar value, Scalar lower, Scalar upper) {
  return std::min(upper, std::max(lower, value));
}

/// Componentwise projection onto [0, upper].
template <typename Derived>
auto project_box(const Eigen::MatrixBase<Derived>& value, const Vector& upper) {
  return value.cwiseMax(0.0).cwiseMin(upper);
}

RandomizedTargets sample_targets(const QoSTargets& targets, Rng& rng);

/// Dispatches to field.evaluate after checking dimensions.
Vector evaluate_rewards(const RewardField& field, const GameAssignment& games,
                        const ActionProfile& actions);

/// Throws std::invalid_argument on a wrong length or out-of-range game.
void check_assignment(const GameAssignment& games, int n_players, int n_games);

struct PartialEstimate {
  int n = 0;  // reward index
  int m = 0;  // perturbed action
  int point = 0;
  double estimate = 0.0;
  bool same_game = false;
};

struct TowConditionReport {
  std::vector<PartialEstimate> partials;
  double step = 0.0;
  double tolerance = 0.0;
  int same_game_pairs = 0;
  int cross_game_pairs = 0;
  // Same-game partial >= 0: the strict ToW inequality fails.
  int same_game_violations = 0;
  // Same-game partial > tolerance: even the weak (non-increasing) form fails.
  int same_game_increasing = 0;
  // Cross-game |partial| > tolerance.
  int cross_game_violations = 0;

  bool ok() const {
    return same_game_violations == 0 && cross_game_violations == 0;
  }
};

/// Central finite-difference sweep of du_n/dx_m over every ordered pair
/// n != m and every sample point.
TowConditionReport check_tow_condition(const RewardField& field,
                                       const GameAssignment& games,
                                       const std::vector<ActionProfile>& points,
                                       double step = 1e-4,
                                       double tolerance = 1e-6);

/// Draws points uniformly in [margin*B, (1-margin)*B].
std::vector<ActionProfile> sample_interior_points(const Bounds& bounds,
                                                  int count, Rng& rng,
                                                  double margin = 0.01);

}  // namespace tow
