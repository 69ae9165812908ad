#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tow/game.hpp"
#include "tow/scenarios.hpp"

namespace tow {

struct OdeOptions {
  double dt = 1e-3;
  double max_time = 1e3;  // 1e6 * dt
  double tol = 1e-9;      // stop once max_n |lambda_bar_n - u_n| < tol
  // Keep every k-th grid profile; 0 keeps only the endpoints.
  std::int64_t record_stride = 0;
};

enum class OdeStop { kConverged, kStalled, kMaxTime };

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<ActionProfile> profiles;
  ActionProfile terminal;
  double terminal_time = 0.0;
  double residual = 0.0;
  std::int64_t steps = 0;
  bool converged = false;
  OdeStop stop = OdeStop::kMaxTime;
};

/// Projected forward Euler on xdot = lambda_bar - u(g, x):
///   x <- clamp(x + dt * (lambda_bar - u(g, x)), 0, B).
/// Also stops when the iterate stops moving (a projected fixed point that
/// is not a zero of h, i.e. pinned at the upper boundary).
OdeTrajectory integrate_ode(const RewardField& field, const GameAssignment& games,
                            const Vector& targets, const ActionProfile& x0,
                            const OdeOptions& options = {});

struct BlockSpectrum {
  int game = 0;
  std::vector<int> players;
  Matrix jacobian;  // Du restricted to the block
  Eigen::VectorXcd eigenvalues;
  bool hyperbolicity_warning = false;  // some |Re| below tolerance
};

/// Finite-difference Du per game block with its eigenvalues.
std::vector<BlockSpectrum> jacobian_spectrum(const RewardField& field,
                                             const GameAssignment& games,
                                             const ActionProfile& point,
                                             double fd_step = 1e-6,
                                             double tolerance = 1e-8);

enum class EquilibriumStatus { kInterior, kBoundaryPinned, kNotConverged, kInfeasible };

std::string to_string(EquilibriumStatus status);

struct EquilibriumReport {
  EquilibriumStatus status = EquilibriumStatus::kNotConverged;
  ActionProfile profile;
  double residual = 0.0;  // max_n |u_n - lambda_bar_n|
  bool converged = false;
  bool interior = false;
  bool minimal = false;
  std::vector<BlockSpectrum> spectrum;
  // Largest real part over the eigenvalues of Dh = -Du (< 0 means stable).
  double max_real_part = 0.0;
  bool hyperbolicity_warning = false;
};

inline constexpr double kInteriorMargin = 1e-6;

bool is_interior(const ActionProfile& x, const Vector& upper, double margin = kInteriorMargin);

/// Integrates from 0, which lies in the domain of attraction of the minimal
/// equilibrium for a cooperative system.
EquilibriumReport minimal_equilibrium(const RewardField& field, const GameAssignment& games,
                                      const Vector& targets, const OdeOptions& options = {});

/// Per game: (diag(c_nn) - diag(lambda_bar) C_g^T) x = N_0 lambda_bar,
/// C_g holding same-game cross gains.
EquilibriumReport power_control_equilibrium_linear(const PowerControlInstance& instance,
                                                   const GameAssignment& games,
                                                   const Vector& targets,
                                                   const Bounds& bounds);

enum class Feasibility { kFeasible, kInfeasible, kUnknown };

std::string to_string(Feasibility verdict);

struct FeasibilityResult {
  Feasibility verdict = Feasibility::kUnknown;
  ActionProfile witness;
  EquilibriumReport report;
};

/// Power control goes through the linear solve; everything else through
/// minimal_equilibrium.
FeasibilityResult check_feasibility(const RewardField& field, const GameAssignment& games,
                                    const Vector& targets, const OdeOptions& options = {});

}  // namespace tow
