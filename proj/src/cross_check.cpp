#include "tow/experiment.hpp"

#include <limits>

namespace tow {

CrossCheckReport cross_check(const ExperimentConfig& config, const ExperimentResult& result) {
  CrossCheckReport report;
  for (const auto& run : result.runs) {
    const RewardField& field = *run.setup.field;
    const Trace& trace = run.trace;
    RealizationCheck row;
    row.run_id = run.setup.index;
    row.seed = run.setup.seed;
    row.targets = trace.targets;
    row.resets = trace.summary.reset_count;
    row.last_reset_round = trace.summary.last_reset_round;
    row.switches = trace.summary.switch_count;
    row.last_switch_round = trace.summary.last_switch_round;
    row.tail_min_reward = trace.summary.tail_mean_min_reward;
    row.boundary_pinned =
        (trace.final_state.actions.array() == field.bounds().upper.array()).any();

    const FeasibilityResult oracle =
        check_feasibility(field, trace.final_state.games, trace.targets);
    row.feasibility = oracle.verdict;
    row.oracle_status = oracle.report.status;
    row.equilibrium = oracle.report.profile;
    row.reward_error = (trace.summary.tail_mean_reward - trace.targets).cwiseAbs().maxCoeff();
    row.action_error = row.equilibrium.size() == trace.summary.tail_mean_actions.size()
                           ? (trace.summary.tail_mean_actions - row.equilibrium).cwiseAbs().maxCoeff()
                           : std::numeric_limits<double>::infinity();
    row.inconclusive = oracle.verdict == Feasibility::kUnknown;
    row.pass = oracle.verdict == Feasibility::kFeasible &&
               row.action_error <= config.check.action_tol &&
               row.reward_error <= config.check.reward_tol;

    if (row.inconclusive) {
      ++report.inconclusive;
    } else {
      ++report.evaluated;
      if (row.pass) ++report.passed;
    }
    report.rows.push_back(std::move(row));
  }
  report.pass_fraction =
      report.evaluated > 0 ? static_cast<double>(report.passed) / report.evaluated : 0.0;
  report.ok = report.evaluated == 0 || report.pass_fraction >= config.check.min_pass_fraction;
  return report;
}

CrossCheckReport cross_check(const ExperimentConfig& config) {
  return cross_check(config, run_experiment(config));
}

}  // namespace tow
