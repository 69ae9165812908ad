#include "tow/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tow {

namespace {

std::vector<std::vector<int>> players_by_game(const GameAssignment& games, int n_games) {
  std::vector<std::vector<int>> blocks(n_games);
  for (Eigen::Index n = 0; n < games.size(); ++n) blocks[games[n]].push_back(static_cast<int>(n));
  return blocks;
}

void summarize_spectrum(EquilibriumReport& report) {
  report.max_real_part = -std::numeric_limits<double>::infinity();
  report.hyperbolicity_warning = false;
  for (const auto& block : report.spectrum) {
    for (Eigen::Index i = 0; i < block.eigenvalues.size(); ++i) {
      report.max_real_part = std::max(report.max_real_part, -block.eigenvalues[i].real());
    }
    report.hyperbolicity_warning = report.hyperbolicity_warning || block.hyperbolicity_warning;
  }
}

}  // namespace

std::string to_string(EquilibriumStatus status) {
  switch (status) {
    case EquilibriumStatus::kInterior: return "interior";
    case EquilibriumStatus::kBoundaryPinned: return "boundary_pinned";
    case EquilibriumStatus::kNotConverged: return "not_converged";
    case EquilibriumStatus::kInfeasible: return "infeasible";
  }
  return "not_converged";
}

std::string to_string(Feasibility verdict) {
  switch (verdict) {
    case Feasibility::kFeasible: return "feasible";
    case Feasibility::kInfeasible: return "infeasible";
    case Feasibility::kUnknown: return "unknown";
  }
  return "unknown";
}

bool is_interior(const ActionProfile& x, const Vector& upper, double margin) {
  return ((x.array() > margin * upper.array()) &&
          (x.array() < upper.array() - margin * upper.array()))
      .all();
}

OdeTrajectory integrate_ode(const RewardField& field, const GameAssignment& games,
                            const Vector& targets, const ActionProfile& x0,
                            const OdeOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("ode: dt must be positive");
  if (!(options.max_time >= 0.0)) throw std::invalid_argument("ode: max_time must be >= 0");
  const Vector& upper = field.bounds().upper;
  if (x0.size() != field.n_players() || targets.size() != field.n_players()) {
    throw std::invalid_argument("ode: dimension mismatch");
  }
  if (!((x0.array() >= 0.0) && (x0.array() <= upper.array())).all()) {
    throw std::invalid_argument("ode: x0 outside the action box");
  }
  check_assignment(games, field.n_players(), field.n_games());

  const auto max_steps = static_cast<std::int64_t>(std::llround(options.max_time / options.dt));
  OdeTrajectory traj;
  ActionProfile x = x0;
  auto record = [&](std::int64_t k) {
    traj.times.push_back(static_cast<double>(k) * options.dt);
    traj.profiles.push_back(x);
  };
  record(0);

  std::int64_t k = 0;
  for (;; ++k) {
    const Vector u = field.evaluate(games, x);
    if (!u.allFinite()) {
      throw std::runtime_error("ode: non-finite reward at t = " +
                               std::to_string(static_cast<double>(k) * options.dt));
    }
    const Vector h = targets - u;
    traj.residual = h.cwiseAbs().maxCoeff();
    if (traj.residual < options.tol) {
      traj.converged = true;
      traj.stop = OdeStop::kConverged;
      break;
    }
    if (k >= max_steps) {
      traj.stop = OdeStop::kMaxTime;
      break;
    }
    ActionProfile next = project_box(x + options.dt * h, upper);
    const double moved = (next - x).cwiseAbs().maxCoeff();
    x = std::move(next);
    if (options.record_stride > 0 && (k + 1) % options.record_stride == 0) record(k + 1);
    if (moved < options.dt * options.tol) {
      ++k;
      const Vector u_end = field.evaluate(games, x);
      traj.residual = (targets - u_end).cwiseAbs().maxCoeff();
      traj.converged = traj.residual < options.tol;
      traj.stop = traj.converged ? OdeStop::kConverged : OdeStop::kStalled;
      break;
    }
  }
  traj.steps = k;
  traj.terminal = x;
  traj.terminal_time = static_cast<double>(k) * options.dt;
  if (traj.times.back() != traj.terminal_time) {
    traj.times.push_back(traj.terminal_time);
    traj.profiles.push_back(x);
  }
  return traj;
}

std::vector<BlockSpectrum> jacobian_spectrum(const RewardField& field,
                                             const GameAssignment& games,
                                             const ActionProfile& point, double fd_step,
                                             double tolerance) {
  const Vector& upper = field.bounds().upper;
  if (point.size() != field.n_players()) throw std::invalid_argument("jacobian: dimension mismatch");
  if (!((point.array() - fd_step > 0.0) && (point.array() + fd_step < upper.array())).all()) {
    throw std::invalid_argument("jacobian: point must be interior (boundary equilibrium rejected)");
  }
  check_assignment(games, field.n_players(), field.n_games());

  const int n = field.n_players();
  Matrix du(n, n);
  for (int m = 0; m < n; ++m) {
    ActionProfile plus = point, minus = point;
    plus[m] += fd_step;
    minus[m] -= fd_step;
    du.col(m) = (field.evaluate(games, plus) - field.evaluate(games, minus)) / (2.0 * fd_step);
  }

  std::vector<BlockSpectrum> out;
  const auto blocks = players_by_game(games, field.n_games());
  for (int g = 0; g < static_cast<int>(blocks.size()); ++g) {
    const auto& idx = blocks[g];
    if (idx.empty()) continue;
    BlockSpectrum block;
    block.game = g;
    block.players = idx;
    block.jacobian = du(idx, idx);
    block.eigenvalues = Eigen::EigenSolver<Matrix>(block.jacobian, false).eigenvalues();
    block.hyperbolicity_warning = (block.eigenvalues.real().array().abs() < tolerance).any();
    out.push_back(std::move(block));
  }
  return out;
}

EquilibriumReport minimal_equilibrium(const RewardField& field, const GameAssignment& games,
                                      const Vector& targets, const OdeOptions& options) {
  const Vector& upper = field.bounds().upper;
  const OdeTrajectory traj =
      integrate_ode(field, games, targets, ActionProfile::Zero(field.n_players()), options);

  EquilibriumReport report;
  report.profile = traj.terminal;
  report.residual = traj.residual;
  report.converged = traj.converged;
  report.interior = is_interior(traj.terminal, upper);
  const bool touches_bound =
      (traj.terminal.array() >= upper.array() - kInteriorMargin * upper.array()).any();
  if (traj.converged && report.interior) {
    report.status = EquilibriumStatus::kInterior;
    report.minimal = true;
  } else if (touches_bound && traj.stop != OdeStop::kMaxTime) {
    report.status = EquilibriumStatus::kBoundaryPinned;
  } else {
    report.status = EquilibriumStatus::kNotConverged;
  }
  if (report.status == EquilibriumStatus::kInterior) {
    report.spectrum = jacobian_spectrum(field, games, report.profile);
    summarize_spectrum(report);
  }
  return report;
}

EquilibriumReport power_control_equilibrium_linear(const PowerControlInstance& instance,
                                                   const GameAssignment& games,
                                                   const Vector& targets,
                                                   const Bounds& bounds) {
  instance.validate();
  const int n = instance.n_players();
  if (targets.size() != n || bounds.upper.size() != n || games.size() != n) {
    throw std::invalid_argument("linear equilibrium: dimension mismatch");
  }
  const int n_games = n == 0 ? 0 : games.maxCoeff() + 1;
  check_assignment(games, n, n_games);

  ActionProfile x = ActionProfile::Zero(n);
  for (const auto& idx : players_by_game(games, n_games)) {
    if (idx.empty()) continue;
    const auto size = static_cast<Eigen::Index>(idx.size());
    // Row i: c_ii x_i - lambda_i sum_{j != i} c_ji x_j = N_0 lambda_i.
    Matrix a(size, size);
    Vector b(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const int p = idx[i];
      for (Eigen::Index j = 0; j < size; ++j) {
        const int q = idx[j];
        a(i, j) = i == j ? instance.gains(p, p) : -targets[p] * instance.gains(q, p);
      }
      b[i] = instance.noise_floor * targets[p];
    }
    const Eigen::PartialPivLU<Matrix> lu(a);
    if (!(lu.rcond() > 1e-14)) throw std::runtime_error("linear equilibrium: singular system");
    const Vector solution = lu.solve(b);
    x(idx) = solution;
  }

  EquilibriumReport report;
  report.profile = x;
  report.converged = true;
  report.residual = (power_control_reward(instance, games, x) - targets).cwiseAbs().maxCoeff();
  report.interior = is_interior(x, bounds.upper);
  if (report.interior) {
    report.status = EquilibriumStatus::kInterior;
    report.minimal = true;  // the per-game solution is unique
    const PowerControlField field(instance, std::max(1, n_games), bounds);
    report.spectrum = jacobian_spectrum(field, games, x);
    summarize_spectrum(report);
  } else {
    report.status = EquilibriumStatus::kInfeasible;
  }
  return report;
}

FeasibilityResult check_feasibility(const RewardField& field, const GameAssignment& games,
                                    const Vector& targets, const OdeOptions& options) {
  FeasibilityResult result;
  if (const auto* power = dynamic_cast<const PowerControlField*>(&field)) {
    try {
      result.report = power_control_equilibrium_linear(power->instance(), games, targets,
                                                       power->bounds());
    } catch (const std::runtime_error&) {
      result.verdict = Feasibility::kUnknown;
      return result;
    }
    result.verdict = result.report.interior ? Feasibility::kFeasible : Feasibility::kInfeasible;
  } else {
    result.report = minimal_equilibrium(field, games, targets, options);
    switch (result.report.status) {
      case EquilibriumStatus::kInterior: result.verdict = Feasibility::kFeasible; break;
      case EquilibriumStatus::kBoundaryPinned:
      case EquilibriumStatus::kInfeasible: result.verdict = Feasibility::kInfeasible; break;
      case EquilibriumStatus::kNotConverged: result.verdict = Feasibility::kUnknown; break;
    }
  }
  result.witness = result.report.profile;
  return result;
}

}  // namespace tow
