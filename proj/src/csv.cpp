#include "tow/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace tow {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_traces_csv(const std::vector<Realization>& runs) {
  std::string out = "run_id,t,player,game,action,reward_true,reward_observed,reset,switch\n";
  for (const auto& run : runs) {
    const std::string id = std::to_string(run.setup.index);
    for (const auto& rec : run.trace.records) {
      const std::string t = std::to_string(rec.t);
      for (Eigen::Index n = 0; n < rec.actions.size(); ++n) {
        out += id;
        out += ',' + t;
        out += ',' + std::to_string(n + 1);
        out += ',' + std::to_string(rec.games[n] + 1);
        out += ',' + format_real(rec.actions[n]);
        out += ',' + format_real(rec.clean_reward[n]);
        out += ',' + format_real(rec.observed_reward[n]);
        out += rec.reset ? ",1" : ",0";
        out += rec.switched[n] ? ",1\n" : ",0\n";
      }
    }
  }
  return out;
}

std::string format_aggregate_csv(const std::vector<AggregateSeries>& series) {
  std::string out = "t,metric,median,q1,q3\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      out += std::to_string(s.t[i]) + ',' + s.metric + ',' + format_real(s.median[i]) + ',' +
             format_real(s.q1[i]) + ',' + format_real(s.q3[i]) + '\n';
    }
  }
  return out;
}

std::string format_aggregate_mean_csv(const std::vector<AggregateSeries>& series) {
  std::string out = "t,metric,mean\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      out += std::to_string(s.t[i]) + ',' + s.metric + ',' + format_real(s.mean[i]) + '\n';
    }
  }
  return out;
}

std::string format_oracle_csv(const std::vector<RealizationSetup>& setups,
                              const std::vector<GameAssignment>& assignments,
                              const std::vector<EquilibriumReport>& reports) {
  if (setups.size() != assignments.size() || setups.size() != reports.size()) {
    throw std::invalid_argument("format_oracle_csv: length mismatch");
  }
  std::string out = "run_id,player,game,equilibrium,lambda_bar,status\n";
  for (std::size_t r = 0; r < setups.size(); ++r) {
    const auto& lambda_bar = setups[r].targets.lambda_bar;
    const std::string status = to_string(reports[r].status);
    for (Eigen::Index n = 0; n < lambda_bar.size(); ++n) {
      out += std::to_string(setups[r].index) + ',' + std::to_string(n + 1) + ',' +
             std::to_string(assignments[r][n] + 1) + ',' + format_real(reports[r].profile[n]) +
             ',' + format_real(lambda_bar[n]) + ',' + status + '\n';
    }
  }
  return out;
}

std::string format_check_csv(const CrossCheckReport& report) {
  std::string out =
      "run_id,seed,status,action_error,reward_error,tail_min_reward,resets,last_reset,switches,"
      "last_switch,boundary_pinned,pass\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.run_id) + ',' + std::to_string(row.seed) + ',' +
           to_string(row.oracle_status) + ',' + format_real(row.action_error) + ',' +
           format_real(row.reward_error) + ',' + format_real(row.tail_min_reward) + ',' +
           std::to_string(row.resets) + ',' + std::to_string(row.last_reset_round) + ',' +
           std::to_string(row.switches) + ',' + std::to_string(row.last_switch_round) + ',' +
           (row.boundary_pinned ? "1" : "0") + ',' + (row.pass ? "1" : "0") + '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace tow
