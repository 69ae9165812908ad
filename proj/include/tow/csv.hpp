#pragma once

#include <string>
#include <vector>

#include "tow/experiment.hpp"

namespace tow {

// 17 significant digits, so every double survives a text round trip.
std::string format_real(double value);

// run_id,t,player,game,action,reward_true,reward_observed,reset,switch
std::string format_traces_csv(const std::vector<Realization>& runs);
// t,metric,median,q1,q3
std::string format_aggregate_csv(const std::vector<AggregateSeries>& series);
// t,metric,mean
std::string format_aggregate_mean_csv(const std::vector<AggregateSeries>& series);
// run_id,player,game,equilibrium,lambda_bar,status
std::string format_oracle_csv(const std::vector<RealizationSetup>& setups,
                              const std::vector<GameAssignment>& assignments,
                              const std::vector<EquilibriumReport>& reports);
// run_id,seed,status,action_error,reward_error,tail_min_reward,resets,
// last_reset,switches,last_switch,boundary_pinned,pass
std::string format_check_csv(const CrossCheckReport& report);

/// Writes `contents` to `path`; throws std::runtime_error naming the path.
void write_file(const std::string& path, const std::string& contents);

}  // namespace tow
