#pragma once

#include <Eigen/Dense>

namespace tow {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// x = [x_1, ..., x_N], one non-negative "pull" per player.
using ActionProfile = Vector;

// g = [g_1, ..., g_N]. Games are 0-based in memory; files and reports
// print them 1-based.
using GameAssignment = Eigen::VectorXi;

// Action box [0, B_n] per player.
struct Bounds {
  Vector upper;

  static Bounds uniform(int n_players, double bound);
  void validate() const;
};

struct QoSTargets {
  Vector lambda;
  double delta = 0.01;

  void validate() const;
};

// lambda_bar drawn in [lambda, lambda + delta].
struct RandomizedTargets {
  Vector lambda_bar;
};

}  // namespace tow
