#include "tow/game.hpp"

#include <cmath>
#include <stdexcept>

namespace tow {

Bounds Bounds::uniform(int n_players, double bound) {
  Bounds b{Vector::Constant(n_players, bound)};
  b.validate();
  return b;
}

void Bounds::validate() const {
  if (upper.size() == 0) throw std::invalid_argument("bounds: empty");
  if (!(upper.array() > 0.0).all() || !upper.allFinite()) {
    throw std::invalid_argument("bounds: every B_n must be positive and finite");
  }
}

void QoSTargets::validate() const {
  if (lambda.size() == 0) throw std::invalid_argument("qos: empty lambda");
  if (!(lambda.array() > 0.0).all()) {
    throw std::invalid_argument("qos: every lambda_n must be positive");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("qos: delta must be positive");
}

Vector RewardField::sample_feedback(const GameAssignment&, const ActionProfile&,
                                    Rng&) const {
  throw std::logic_error(kind() + " has no structural feedback model");
}

RandomizedTargets sample_targets(const QoSTargets& targets, Rng& rng) {
  targets.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomizedTargets out{Vector(targets.lambda.size())};
  for (Eigen::Index n = 0; n < targets.lambda.size(); ++n) {
    out.lambda_bar[n] = targets.lambda[n] + targets.delta * unit(rng);
  }
  return out;
}

void check_assignment(const GameAssignment& games, int n_players, int n_games) {
  if (games.size() != n_players) {
    throw std::invalid_argument("assignment length " + std::to_string(games.size()) +
                                " != players " + std::to_string(n_players));
  }
  if (n_players > 0 && (games.minCoeff() < 0 || games.maxCoeff() >= n_games)) {
    throw std::invalid_argument("assignment has a game outside [1, " +
                                std::to_string(n_games) + "]");
  }
}

Vector evaluate_rewards(const RewardField& field, const GameAssignment& games,
                        const ActionProfile& actions) {
  if (actions.size() != field.n_players()) {
    throw std::invalid_argument("action profile length " +
                                std::to_string(actions.size()) + " != players " +
                                std::to_string(field.n_players()));
  }
  check_assignment(games, field.n_players(), field.n_games());
  return field.evaluate(games, actions);
}

TowConditionReport check_tow_condition(const RewardField& field,
                                       const GameAssignment& games,
                                       const std::vector<ActionProfile>& points,
                                       double step, double tolerance) {
  if (!(step > 0.0)) throw std::invalid_argument("tow check: step must be positive");
  const int n_players = field.n_players();
  const Vector& upper = field.bounds().upper;
  check_assignment(games, n_players, field.n_games());

  TowConditionReport report;
  report.step = step;
  report.tolerance = tolerance;
  report.partials.reserve(points.size() * n_players * std::max(0, n_players - 1));

  for (std::size_t p = 0; p < points.size(); ++p) {
    const ActionProfile& x = points[p];
    if (x.size() != n_players) {
      throw std::invalid_argument("tow check: sample point has wrong length");
    }
    for (int m = 0; m < n_players; ++m) {
      if (!(x[m] > 0.0 && x[m] < upper[m])) {
        throw std::invalid_argument("tow check: sample point " + std::to_string(p) +
                                    " is not strictly interior");
      }
      if (x[m] - step < 0.0 || x[m] + step > upper[m]) {
        throw std::invalid_argument("tow check: step leaves the box at point " +
                                    std::to_string(p));
      }
    }
    for (int m = 0; m < n_players; ++m) {
      ActionProfile plus = x, minus = x;
      plus[m] += step;
      minus[m] -= step;
      const Vector du = (field.evaluate(games, plus) - field.evaluate(games, minus)) /
                        (2.0 * step);
      for (int n = 0; n < n_players; ++n) {
        if (n == m) continue;
        PartialEstimate e{n, m, static_cast<int>(p), du[n], games[n] == games[m]};
        if (e.same_game) {
          ++report.same_game_pairs;
          if (e.estimate >= 0.0) ++report.same_game_violations;
          if (e.estimate > tolerance) ++report.same_game_increasing;
        } else {
          ++report.cross_game_pairs;
          if (std::abs(e.estimate) > tolerance) ++report.cross_game_violations;
        }
        report.partials.push_back(e);
      }
    }
  }
  return report;
}

std::vector<ActionProfile> sample_interior_points(const Bounds& bounds, int count,
                                                  Rng& rng, double margin) {
  std::uniform_real_distribution<double> unit(margin, 1.0 - margin);
  std::vector<ActionProfile> points;
  points.reserve(count);
  for (int i = 0; i < count; ++i) {
    ActionProfile x(bounds.upper.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) x[n] = bounds.upper[n] * unit(rng);
    points.push_back(std::move(x));
  }
  return points;
}

}  // namespace tow
