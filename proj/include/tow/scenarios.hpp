#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tow/game.hpp"

namespace tow {

// ---------------------------------------------------------------------------
// Multi-channel power control: u_n = c_nn x_n / (N_0 + I_n(g, x)).

template <typename Scalar>
struct BasicPowerControlInstance {
  // gains(m, n) = c_{m,n}: transmitter m -> receiver n.
  MatrixX<Scalar> gains;
  Scalar noise_floor = Scalar(0.1);

  int n_players() const { return static_cast<int>(gains.rows()); }

  void validate() const {
    if (gains.rows() == 0 || gains.rows() != gains.cols()) {
      throw std::invalid_argument("power control: gain matrix must be square and non-empty");
    }
    if (!(gains.array() > Scalar(0)).all()) {
      throw std::invalid_argument("power control: every gain c_{m,n} must be positive");
    }
    if (!(noise_floor > Scalar(0))) {
      throw std::invalid_argument("power control: noise floor must be positive");
    }
  }
};
using PowerControlInstance = BasicPowerControlInstance<double>;

/// I_n = sum over same-game m != n of c_{m,n} x_m.
template <typename Scalar>
VectorX<Scalar> power_control_interference(const BasicPowerControlInstance<Scalar>& instance,
                                           const GameAssignment& games,
                                           const VectorX<Scalar>& actions) {
  const Eigen::Index n = instance.gains.rows();
  if (actions.size() != n || games.size() != n) {
    throw std::invalid_argument("power control: dimension mismatch");
  }
  const int k = n == 0 ? 0 : games.maxCoeff() + 1;
  MatrixX<Scalar> by_game = MatrixX<Scalar>::Zero(n, k);
  for (Eigen::Index m = 0; m < n; ++m) by_game(m, games[m]) = actions[m];
  // received(n, k): power at receiver n from every transmitter in game k.
  const MatrixX<Scalar> received = instance.gains.transpose() * by_game;
  VectorX<Scalar> interference(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    interference[i] = received(i, games[i]) - instance.gains(i, i) * actions[i];
  }
  return interference;
}

template <typename Scalar>
VectorX<Scalar> power_control_reward(const BasicPowerControlInstance<Scalar>& instance,
                                     const GameAssignment& games,
                                     const VectorX<Scalar>& actions) {
  const VectorX<Scalar> interference =
      power_control_interference(instance, games, actions);
  return (instance.gains.diagonal().array() * actions.array() /
          (instance.noise_floor + interference.array()))
      .matrix();
}

PowerControlInstance gen_power_control(int n_players, Rng& rng);

// ---------------------------------------------------------------------------
// Distributed task allocation:
//   U_g = ln(alpha_g + S_g),  S_g = sum_{m: g_m = g} beta_{m,g} x_m
//   u_n = beta_{n,g_n} x_n / S_{g_n} * U_{g_n}     (0 when S_{g_n} = 0)

template <typename Scalar>
struct BasicTaskAllocationInstance {
  VectorX<Scalar> alpha;  // one per task, >= 1
  MatrixX<Scalar> beta;   // N x K proficiencies, >= 0

  int n_players() const { return static_cast<int>(beta.rows()); }
  int n_tasks() const { return static_cast<int>(alpha.size()); }

  void validate() const {
    if (alpha.size() == 0 || beta.rows() == 0 || beta.cols() != alpha.size()) {
      throw std::invalid_argument("task allocation: beta must be N x K with K = len(alpha)");
    }
    if (!(alpha.array() >= Scalar(1)).all()) {
      throw std::invalid_argument("task allocation: every alpha_g must be >= 1");
    }
    if (!(beta.array() >= Scalar(0)).all()) {
      throw std::invalid_argument("task allocation: every beta_{m,g} must be >= 0");
    }
  }
};
using TaskAllocationInstance = BasicTaskAllocationInstance<double>;

template <typename Scalar>
VectorX<Scalar> task_allocation_reward(const BasicTaskAllocationInstance<Scalar>& instance,
                                       const GameAssignment& games,
                                       const VectorX<Scalar>& actions) {
  using std::log;
  const Eigen::Index n = instance.beta.rows();
  if (actions.size() != n || games.size() != n) {
    throw std::invalid_argument("task allocation: dimension mismatch");
  }
  if (n > 0 && games.maxCoeff() >= instance.alpha.size()) {
    throw std::invalid_argument("task allocation: game index exceeds task count");
  }
  VectorX<Scalar> effort = VectorX<Scalar>::Zero(instance.alpha.size());
  for (Eigen::Index m = 0; m < n; ++m) {
    effort[games[m]] += instance.beta(m, games[m]) * actions[m];
  }
  VectorX<Scalar> reward(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = games[i];
    const Scalar share = instance.beta(i, g) * actions[i];
    reward[i] = effort[g] > Scalar(0)
                    ? share / effort[g] * log(instance.alpha[g] + effort[g])
                    : Scalar(0);
  }
  return reward;
}

TaskAllocationInstance gen_task_allocation(int n_players, int n_tasks, Rng& rng);

// ---------------------------------------------------------------------------
// Sensor activation. Action x_n is the probability that sensor n is off.
// A packet from n is delivered iff n is active and a chain of active
// sensors connects it to the (always-on) sink.

struct SensorNetworkInstance {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency;
  Eigen::Array<bool, Eigen::Dynamic, 1> sink_link;
  int packets_per_round = 100;
  double value_scale = 0.8;    // f(p) = value_scale * sqrt(p)
  double offset = 0.8;         // alpha
  double energy_weight = 2.0;  // beta

  int n_sensors() const { return static_cast<int>(sink_link.size()); }
  void validate() const;
};

inline constexpr int kMaxEnumeratedSensors = 20;

/// For each of the 2^N activation states, the bitmask of sensors whose
/// packet reaches the sink. Built once per topology.
class SensorReachTable {
 public:
  explicit SensorReachTable(const SensorNetworkInstance& instance);

  int n_sensors() const { return n_; }
  std::uint32_t delivered(std::uint32_t active_mask) const { return delivered_[active_mask]; }

  /// Exact E[1{delivered_n}] with sensor m active w.p. 1 - x_m independently.
  Vector delivery_probability(const ActionProfile& actions) const;

 private:
  int n_;
  std::vector<std::uint32_t> delivered_;
};

Vector sensor_delivery_probability_exact(const SensorNetworkInstance& instance,
                                         const ActionProfile& actions);

/// max(0, value_scale * sqrt(P_n) - offset + energy_weight * x_n).
Vector sensor_reward(const SensorNetworkInstance& instance, const ActionProfile& actions,
                     const Vector& delivery_prob);

/// Binomial(L, P_n) packet counts turned into rewards at P_hat = count / L.
Vector sensor_feedback_sample(const SensorNetworkInstance& instance,
                              const ActionProfile& actions, const Vector& delivery_prob,
                              Rng& rng);
Vector sensor_feedback_sample(const SensorNetworkInstance& instance,
                              const ActionProfile& actions, Rng& rng);

/// The P_hat vector alone (what the packet counter reports).
Vector sensor_delivery_estimate(const SensorNetworkInstance& instance,
                                const Vector& delivery_prob, Rng& rng);

SensorNetworkInstance gen_sensor_network(int n_sensors, double edge_prob, Rng& rng);

// ---------------------------------------------------------------------------
// RewardField adapters.

class PowerControlField final : public RewardField {
 public:
  PowerControlField(PowerControlInstance instance, int n_games, Bounds bounds);

  int n_players() const override { return instance_.n_players(); }
  int n_games() const override { return n_games_; }
  const Bounds& bounds() const override { return bounds_; }
  std::string kind() const override { return "power_control"; }
  Vector evaluate(const GameAssignment& games, const ActionProfile& actions) const override;

  const PowerControlInstance& instance() const { return instance_; }

 private:
  PowerControlInstance instance_;
  int n_games_;
  Bounds bounds_;
};

class TaskAllocationField final : public RewardField {
 public:
  TaskAllocationField(TaskAllocationInstance instance, Bounds bounds);

  int n_players() const override { return instance_.n_players(); }
  int n_games() const override { return instance_.n_tasks(); }
  const Bounds& bounds() const override { return bounds_; }
  std::string kind() const override { return "task_allocation"; }
  Vector evaluate(const GameAssignment& games, const ActionProfile& actions) const override;

  const TaskAllocationInstance& instance() const { return instance_; }

 private:
  TaskAllocationInstance instance_;
  Bounds bounds_;
};

class SensorActivationField final : public RewardField {
 public:
  SensorActivationField(SensorNetworkInstance instance, Bounds bounds);

  int n_players() const override { return instance_.n_sensors(); }
  int n_games() const override { return 1; }
  const Bounds& bounds() const override { return bounds_; }
  std::string kind() const override { return "sensor_activation"; }
  Vector evaluate(const GameAssignment& games, const ActionProfile& actions) const override;

  bool has_structural_feedback() const override { return true; }
  Vector sample_feedback(const GameAssignment& games, const ActionProfile& actions,
                         Rng& rng) const override;

  const SensorNetworkInstance& instance() const { return instance_; }
  Vector delivery_probability(const ActionProfile& actions) const {
    return reach_.delivery_probability(actions);
  }

 private:
  SensorNetworkInstance instance_;
  Bounds bounds_;
  SensorReachTable reach_;
};

}  // namespace tow
