#include "tow/scenarios.hpp"

#include <algorithm>
#include <bit>

namespace tow {

namespace {

constexpr double kMinGain = 1e-9;

void check_profile(const ActionProfile& actions, int n, const char* who) {
  if (actions.size() != n) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}

}  // namespace

PowerControlInstance gen_power_control(int n_players, Rng& rng) {
  if (n_players < 1) throw std::invalid_argument("gen_power_control: need >= 1 player");
  std::uniform_real_distribution<double> direct(0.2, 0.8);
  std::uniform_real_distribution<double> cross(0.0, 0.2);
  PowerControlInstance instance;
  instance.gains.resize(n_players, n_players);
  for (int m = 0; m < n_players; ++m) {
    for (int n = 0; n < n_players; ++n) {
      instance.gains(m, n) = m == n ? direct(rng) : std::max(kMinGain, cross(rng));
    }
  }
  instance.noise_floor = 0.1;
  return instance;
}

TaskAllocationInstance gen_task_allocation(int n_players, int n_tasks, Rng& rng) {
  if (n_players < 1 || n_tasks < 1) {
    throw std::invalid_argument("gen_task_allocation: need >= 1 player and task");
  }
  std::uniform_real_distribution<double> alpha(1.1, 5.0);
  std::uniform_real_distribution<double> beta(100.0, 200.0);
  TaskAllocationInstance instance;
  instance.alpha.resize(n_tasks);
  for (int g = 0; g < n_tasks; ++g) instance.alpha[g] = alpha(rng);
  instance.beta.resize(n_players, n_tasks);
  for (int m = 0; m < n_players; ++m) {
    for (int g = 0; g < n_tasks; ++g) instance.beta(m, g) = beta(rng);
  }
  return instance;
}

// ---------------------------------------------------------------------------

void SensorNetworkInstance::validate() const {
  const auto n = sink_link.size();
  if (n == 0) throw std::invalid_argument("sensor network: no sensors");
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw std::invalid_argument("sensor network: adjacency must be N x N");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i)) throw std::invalid_argument("sensor network: self loop");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (adjacency(i, j) != adjacency(j, i)) {
        throw std::invalid_argument("sensor network: adjacency must be symmetric");
      }
    }
  }
  if (packets_per_round < 1) throw std::invalid_argument("sensor network: L must be >= 1");
  if (!(value_scale > 0.0) || !(energy_weight > 0.0)) {
    throw std::invalid_argument("sensor network: value scale and energy weight must be positive");
  }
}

SensorReachTable::SensorReachTable(const SensorNetworkInstance& instance)
    : n_(instance.n_sensors()) {
  instance.validate();
  if (n_ > kMaxEnumeratedSensors) {
    throw std::invalid_argument("sensor network: " + std::to_string(n_) +
                                " sensors exceed the exact-enumeration limit of " +
                                std::to_string(kMaxEnumeratedSensors));
  }
  std::vector<std::uint32_t> neighbours(n_, 0);
  std::uint32_t sink_mask = 0;
  for (int i = 0; i < n_; ++i) {
    if (instance.sink_link[i]) sink_mask |= 1u << i;
    for (int j = 0; j < n_; ++j) {
      if (instance.adjacency(i, j)) neighbours[i] |= 1u << j;
    }
  }
  const std::uint32_t states = 1u << n_;
  delivered_.resize(states);
  for (std::uint32_t active = 0; active < states; ++active) {
    // Grow the set of active sensors connected to the sink.
    std::uint32_t reached = active & sink_mask;
    std::uint32_t frontier = reached;
    while (frontier != 0) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f != 0; f &= f - 1) {
        next |= neighbours[std::countr_zero(f)];
      }
      next &= active & ~reached;
      reached |= next;
      frontier = next;
    }
    delivered_[active] = reached;
  }
}

Vector SensorReachTable::delivery_probability(const ActionProfile& actions) const {
  check_profile(actions, n_, "sensor delivery probability");
  if (!((actions.array() >= 0.0) && (actions.array() <= 1.0)).all()) {
    throw std::invalid_argument("sensor delivery probability: actions must lie in [0, 1]");
  }
  // weight[s] = P(activation state s), built one sensor at a time.
  std::vector<double> weight(std::size_t{1} << n_);
  weight[0] = 1.0;
  for (int m = 0; m < n_; ++m) {
    const std::size_t half = std::size_t{1} << m;
    const double off = actions[m];
    const double on = 1.0 - actions[m];
    for (std::size_t s = 0; s < half; ++s) {
      weight[s | half] = weight[s] * on;
      weight[s] *= off;
    }
  }
  Vector prob = Vector::Zero(n_);
  for (std::size_t s = 0; s < weight.size(); ++s) {
    if (weight[s] == 0.0) continue;
    for (std::uint32_t d = delivered_[s]; d != 0; d &= d - 1) {
      prob[std::countr_zero(d)] += weight[s];
    }
  }
  // Summing 2^N weights can overshoot 1 by an ulp or two.
  return prob.cwiseMin(1.0);
}

Vector sensor_delivery_probability_exact(const SensorNetworkInstance& instance,
                                         const ActionProfile& actions) {
  return SensorReachTable(instance).delivery_probability(actions);
}

Vector sensor_reward(const SensorNetworkInstance& instance, const ActionProfile& actions,
                     const Vector& delivery_prob) {
  check_profile(actions, instance.n_sensors(), "sensor reward");
  check_profile(delivery_prob, instance.n_sensors(), "sensor reward");
  if (!((delivery_prob.array() >= 0.0) && (delivery_prob.array() <= 1.0)).all()) {
    throw std::invalid_argument("sensor reward: delivery probabilities must lie in [0, 1]");
  }
  const Eigen::ArrayXd raw = instance.value_scale * delivery_prob.array().sqrt() -
                             instance.offset + instance.energy_weight * actions.array();
  return raw.max(0.0).matrix();
}

Vector sensor_delivery_estimate(const SensorNetworkInstance& instance,
                                const Vector& delivery_prob, Rng& rng) {
  check_profile(delivery_prob, instance.n_sensors(), "sensor feedback");
  const int packets = instance.packets_per_round;
  Vector estimate(delivery_prob.size());
  for (Eigen::Index n = 0; n < delivery_prob.size(); ++n) {
    const double p = std::clamp(delivery_prob[n], 0.0, 1.0);
    std::binomial_distribution<int> received(packets, p);
    estimate[n] = static_cast<double>(received(rng)) / packets;
  }
  return estimate;
}

Vector sensor_feedback_sample(const SensorNetworkInstance& instance,
                              const ActionProfile& actions, const Vector& delivery_prob,
                              Rng& rng) {
  return sensor_reward(instance, actions, sensor_delivery_estimate(instance, delivery_prob, rng));
}

Vector sensor_feedback_sample(const SensorNetworkInstance& instance,
                              const ActionProfile& actions, Rng& rng) {
  return sensor_feedback_sample(instance, actions,
                                sensor_delivery_probability_exact(instance, actions), rng);
}

SensorNetworkInstance gen_sensor_network(int n_sensors, double edge_prob, Rng& rng) {
  if (n_sensors < 1) throw std::invalid_argument("gen_sensor_network: need >= 1 sensor");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw std::invalid_argument("gen_sensor_network: edge probability must lie in [0, 1]");
  }
  std::bernoulli_distribution edge(edge_prob);
  SensorNetworkInstance instance;
  instance.adjacency.setConstant(n_sensors, n_sensors, false);
  for (int i = 0; i < n_sensors; ++i) {
    for (int j = i + 1; j < n_sensors; ++j) {
      const bool linked = edge(rng);
      instance.adjacency(i, j) = linked;
      instance.adjacency(j, i) = linked;
    }
  }
  instance.sink_link.resize(n_sensors);
  for (int i = 0; i < n_sensors; ++i) instance.sink_link[i] = edge(rng);
  return instance;
}

// ---------------------------------------------------------------------------

PowerControlField::PowerControlField(PowerControlInstance instance, int n_games, Bounds bounds)
    : instance_(std::move(instance)), n_games_(n_games), bounds_(std::move(bounds)) {
  instance_.validate();
  bounds_.validate();
  if (n_games_ < 1) throw std::invalid_argument("power control: need >= 1 channel");
  if (bounds_.upper.size() != instance_.n_players()) {
    throw std::invalid_argument("power control: bounds length != players");
  }
}

Vector PowerControlField::evaluate(const GameAssignment& games,
                                   const ActionProfile& actions) const {
  return power_control_reward(instance_, games, actions);
}

TaskAllocationField::TaskAllocationField(TaskAllocationInstance instance, Bounds bounds)
    : instance_(std::move(instance)), bounds_(std::move(bounds)) {
  instance_.validate();
  bounds_.validate();
  if (bounds_.upper.size() != instance_.n_players()) {
    throw std::invalid_argument("task allocation: bounds length != players");
  }
}

Vector TaskAllocationField::evaluate(const GameAssignment& games,
                                     const ActionProfile& actions) const {
  return task_allocation_reward(instance_, games, actions);
}

SensorActivationField::SensorActivationField(SensorNetworkInstance instance, Bounds bounds)
    : instance_(std::move(instance)), bounds_(std::move(bounds)), reach_(instance_) {
  bounds_.validate();
  if (bounds_.upper.size() != instance_.n_sensors()) {
    throw std::invalid_argument("sensor activation: bounds length != sensors");
  }
  if ((bounds_.upper.array() > 1.0).any()) {
    throw std::invalid_argument("sensor activation: off-probability bounds must be <= 1");
  }
}

Vector SensorActivationField::evaluate(const GameAssignment&,
                                       const ActionProfile& actions) const {
  return sensor_reward(instance_, actions, reach_.delivery_probability(actions));
}

Vector SensorActivationField::sample_feedback(const GameAssignment&,
                                              const ActionProfile& actions, Rng& rng) const {
  return sensor_feedback_sample(instance_, actions, reach_.delivery_probability(actions), rng);
}

}  // namespace tow
