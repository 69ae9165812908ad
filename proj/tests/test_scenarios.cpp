#include "doctest.h"

#include <cmath>

#include "tow/scenarios.hpp"

using namespace tow;

namespace {

PowerControlInstance weak_cross_instance() {
  PowerControlInstance inst;
  inst.gains.resize(2, 2);
  inst.gains << 1.0, 0.1, 0.1, 1.0;
  inst.noise_floor = 0.1;
  return inst;
}

// 1 -- 2 -- sink; sensor 1 has no sink link.
SensorNetworkInstance line_network() {
  SensorNetworkInstance inst;
  inst.adjacency.setConstant(2, 2, false);
  inst.adjacency(0, 1) = inst.adjacency(1, 0) = true;
  inst.sink_link.resize(2);
  inst.sink_link << false, true;
  return inst;
}

// Brute-force reference: enumerate states, walk paths by repeated relaxation.
Vector delivery_by_relaxation(const SensorNetworkInstance& inst, const ActionProfile& x) {
  const int n = inst.n_sensors();
  Vector p = Vector::Zero(n);
  for (std::uint32_t state = 0; state < (1u << n); ++state) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= (state >> i & 1u) ? 1.0 - x[i] : x[i];
    std::vector<bool> reach(n, false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < n; ++i) {
        if (reach[i] || !(state >> i & 1u)) continue;
        bool ok = inst.sink_link[i];
        for (int j = 0; j < n && !ok; ++j) ok = inst.adjacency(i, j) && reach[j];
        if (ok) reach[i] = changed = true;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (reach[i]) p[i] += w;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("power control SINR, shared channel") {
  const auto inst = weak_cross_instance();
  Vector x(2);
  x << 0.1, 0.2;
  const Vector u = power_control_reward(inst, GameAssignment(GameAssignment::Zero(2)), x);
  CHECK(u[0] == doctest::Approx(0.1 / 0.12).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(0.2 / 0.11).epsilon(1e-14));
  CHECK(u[0] == doctest::Approx(0.833333333333333).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(1.818181818181818).epsilon(1e-12));
}

TEST_CASE("power control SINR, separate channels") {
  const auto inst = weak_cross_instance();
  Vector x(2);
  x << 0.1, 0.2;
  GameAssignment g(2);
  g << 0, 1;
  const Vector u = power_control_reward(inst, g, x);
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("power control: zero power, zero reward") {
  Vector x(2);
  x << 0.0, 0.9;
  CHECK(power_control_reward(weak_cross_instance(), GameAssignment(GameAssignment::Zero(2)), x)[0] == 0.0);
}

TEST_CASE("power control uses gains(m, n) as transmitter m -> receiver n") {
  PowerControlInstance inst;
  inst.gains.resize(2, 2);
  inst.gains << 1.0, 0.3, 0.05, 1.0;  // c_12 = 0.3 hits receiver 2
  inst.noise_floor = 0.1;
  Vector x(2);
  x << 1.0, 1.0;
  const Vector u = power_control_reward(inst, GameAssignment(GameAssignment::Zero(2)), x);
  CHECK(u[0] == doctest::Approx(1.0 / (0.1 + 0.05)));
  CHECK(u[1] == doctest::Approx(1.0 / (0.1 + 0.3)));
}

TEST_CASE("power control instance validation") {
  auto inst = weak_cross_instance();
  inst.gains(0, 1) = 0.0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst = weak_cross_instance();
  inst.noise_floor = 0.0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  const GameAssignment three = GameAssignment::Zero(3);
  const Vector two = Vector::Zero(2);
  CHECK_THROWS_AS(power_control_reward(weak_cross_instance(), three, two),
                  std::invalid_argument);
}

TEST_CASE("power control reward works on other scalar types") {
  BasicPowerControlInstance<float> inst;
  inst.gains.resize(2, 2);
  inst.gains << 1.0f, 0.1f, 0.1f, 1.0f;
  inst.noise_floor = 0.1f;
  VectorX<float> x(2);
  x << 0.1f, 0.2f;
  const VectorX<float> u = power_control_reward(inst, GameAssignment(GameAssignment::Zero(2)), x);
  CHECK(u[0] == doctest::Approx(0.1 / 0.12).epsilon(1e-6));
}

TEST_CASE("task allocation, shared task") {
  TaskAllocationInstance inst;
  inst.alpha = Vector::Constant(1, 1.0);
  inst.beta = Matrix::Constant(2, 1, 1.0);
  const Vector u = task_allocation_reward(inst, GameAssignment(GameAssignment::Zero(2)), Vector(Vector::Constant(2, 1.0)));
  CHECK(u[0] == doctest::Approx(std::log(3.0) / 2.0).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(0.549306144334055).epsilon(1e-12));
  CHECK(u.sum() == doctest::Approx(1.098612288668110).epsilon(1e-12));
}

TEST_CASE("task allocation, single agent closed form") {
  TaskAllocationInstance inst;
  inst.alpha = Vector::Constant(1, 1.0);
  inst.beta = Matrix::Constant(1, 1, 1.0);
  const Vector u =
      task_allocation_reward(inst, GameAssignment(GameAssignment::Zero(1)),
                             Vector(Vector::Constant(1, std::exp(1.0) - 1.0)));
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("task allocation: zero effort, zero reward, including 0/0") {
  TaskAllocationInstance inst;
  inst.alpha = Vector::Constant(2, 1.5);
  inst.beta = Matrix::Constant(3, 2, 120.0);
  GameAssignment g(3);
  g << 0, 0, 1;
  Vector x(3);
  x << 0.0, 2.0, 0.0;
  const Vector u = task_allocation_reward(inst, g, x);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == doctest::Approx(std::log(1.5 + 240.0)));
  CHECK(u[2] == 0.0);
}

TEST_CASE("task allocation validation") {
  TaskAllocationInstance inst;
  inst.alpha = Vector::Constant(1, 0.5);
  inst.beta = Matrix::Constant(2, 1, 1.0);
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst.alpha[0] = 1.0;
  inst.beta(0, 0) = -1.0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}

TEST_CASE("sensor line topology, exact delivery") {
  const auto inst = line_network();
  const Vector p = sensor_delivery_probability_exact(inst, Vector::Constant(2, 0.5));
  CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sensor delivery edge cases") {
  const auto inst = line_network();
  Vector x(2);
  x << 1.0, 0.3;
  CHECK(sensor_delivery_probability_exact(inst, x)[0] == 0.0);
  const Vector all_on = sensor_delivery_probability_exact(inst, Vector::Zero(2));
  CHECK(all_on[0] == doctest::Approx(1.0));
  CHECK(all_on[1] == doctest::Approx(1.0));
}

TEST_CASE("sensor delivery matches an independent relaxation enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = gen_sensor_network(7, 0.3, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ActionProfile x(7);
    for (int i = 0; i < 7; ++i) x[i] = unit(rng);
    const Vector fast = sensor_delivery_probability_exact(inst, x);
    const Vector slow = delivery_by_relaxation(inst, x);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sensor enumeration limit") {
  SensorNetworkInstance inst;
  inst.adjacency.setConstant(21, 21, false);
  inst.sink_link.setConstant(21, true);
  CHECK_THROWS_AS(sensor_delivery_probability_exact(inst, Vector::Zero(21)), std::invalid_argument);
}

TEST_CASE("sensor network validation") {
  auto inst = line_network();
  inst.adjacency(0, 1) = false;  // asymmetric
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst = line_network();
  inst.adjacency(1, 1) = true;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  inst = line_network();
  inst.packets_per_round = 0;
  CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
}

TEST_CASE("sensor reward values") {
  const auto inst = line_network();
  Vector x(2), p(2);
  x << 0.5, 0.5;
  p << 0.25, 0.5;
  const Vector u = sensor_reward(inst, x, p);
  CHECK(u[1] == doctest::Approx(0.8 * std::sqrt(0.5) - 0.8 + 1.0).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(0.765685424949238).epsilon(1e-12));

  Vector zero = Vector::Zero(2), one = Vector::Ones(2);
  CHECK(sensor_reward(inst, zero, one)[0] == doctest::Approx(0.0));
  CHECK(sensor_reward(inst, zero, zero)[0] == 0.0);  // raw -0.8, floored
}

TEST_CASE("sensor feedback: degenerate and concentrated draws") {
  const auto inst = line_network();
  Rng rng(3);
  Vector p(2);
  p << 0.0, 1.0;
  for (int i = 0; i < 100; ++i) {
    const Vector est = sensor_delivery_estimate(inst, p, rng);
    CHECK(est[0] == 0.0);
    CHECK(est[1] == 1.0);
  }
}

TEST_CASE("sensor feedback is unbiased for P") {
  Rng rng(23);
  const auto inst = gen_sensor_network(10, 0.2, rng);
  ActionProfile x = ActionProfile::Constant(10, 0.2);
  const Vector p = sensor_delivery_probability_exact(inst, x);
  const int draws = 20000;
  Vector mean = Vector::Zero(10);
  for (int i = 0; i < draws; ++i) mean += sensor_delivery_estimate(inst, p, rng);
  mean /= draws;
  for (int n = 0; n < 10; ++n) {
    const double bound = 4.0 * std::sqrt(p[n] * (1.0 - p[n]) / (100.0 * draws));
    CHECK(std::abs(mean[n] - p[n]) <= bound);
  }
}

TEST_CASE("sensor feedback approaches the clean reward for large L") {
  Rng rng(4);
  auto inst = gen_sensor_network(6, 0.4, rng);
  inst.packets_per_round = 10000000;
  const ActionProfile x = ActionProfile::Constant(6, 0.3);
  const Vector p = sensor_delivery_probability_exact(inst, x);
  const Vector clean = sensor_reward(inst, x, p);
  const Vector noisy = sensor_feedback_sample(inst, x, p, rng);
  CHECK((noisy - clean).cwiseAbs().maxCoeff() < 5e-3);
}

TEST_CASE("generators: ranges, shapes, determinism") {
  Rng a(99), b(99);
  const auto pc = gen_power_control(8, a);
  CHECK(pc.gains.rows() == 8);
  CHECK(pc.noise_floor == 0.1);
  for (int m = 0; m < 8; ++m) {
    for (int n = 0; n < 8; ++n) {
      if (m == n) {
        CHECK(pc.gains(m, n) >= 0.2);
        CHECK(pc.gains(m, n) <= 0.8);
      } else {
        CHECK(pc.gains(m, n) >= 1e-9);
        CHECK(pc.gains(m, n) <= 0.2);
      }
    }
  }
  CHECK(gen_power_control(8, b).gains == pc.gains);

  const auto ta = gen_task_allocation(5, 3, a);
  CHECK(ta.alpha.size() == 3);
  CHECK(ta.beta.rows() == 5);
  CHECK(ta.beta.cols() == 3);
  CHECK((ta.alpha.array() >= 1.1).all());
  CHECK((ta.alpha.array() <= 5.0).all());
  CHECK((ta.beta.array() >= 100.0).all());
  CHECK((ta.beta.array() <= 200.0).all());

  const auto sn = gen_sensor_network(10, 0.2, a);
  CHECK_NOTHROW(sn.validate());
  CHECK(sn.packets_per_round == 100);
  CHECK(sn.value_scale == 0.8);
  CHECK(sn.offset == 0.8);
  CHECK(sn.energy_weight == 2.0);

  Rng c(1);
  CHECK(gen_power_control(1, c).gains.size() == 1);
  CHECK(gen_task_allocation(1, 1, c).beta.size() == 1);
  CHECK(gen_sensor_network(1, 0.2, c).n_sensors() == 1);
}

TEST_CASE("sensor generator edge density") {
  Rng rng(12);
  int edges = 0, links = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const auto sn = gen_sensor_network(10, 0.2, rng);
    edges += static_cast<int>(sn.adjacency.count()) / 2;
    links += static_cast<int>(sn.sink_link.count());
  }
  CHECK(edges / (45.0 * trials) == doctest::Approx(0.2).epsilon(0.05));
  CHECK(links / (10.0 * trials) == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("reward fields wrap the scenario functions") {
  Rng rng(2);
  const auto pc = gen_power_control(4, rng);
  const PowerControlField power(pc, 2, Bounds::uniform(4, 1.0));
  GameAssignment g(4);
  g << 0, 1, 0, 1;
  const ActionProfile x = ActionProfile::LinSpaced(4, 0.1, 0.4);
  CHECK(power.evaluate(g, x) == power_control_reward(pc, g, x));
  CHECK_FALSE(power.has_structural_feedback());
  CHECK_THROWS_AS(power.sample_feedback(g, x, rng), std::logic_error);

  const auto sn = gen_sensor_network(5, 0.4, rng);
  const SensorActivationField sensor(sn, Bounds::uniform(5, 1.0));
  const ActionProfile y = ActionProfile::Constant(5, 0.25);
  CHECK((sensor.evaluate(GameAssignment::Zero(5), y) -
         sensor_reward(sn, y, sensor_delivery_probability_exact(sn, y)))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK(sensor.has_structural_feedback());
  CHECK_THROWS_AS(SensorActivationField(sn, Bounds::uniform(5, 1.5)), std::invalid_argument);
}
