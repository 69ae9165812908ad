#include "tow/learner.hpp"

#include <cmath>
#include <stdexcept>

namespace tow {

StepsizeSchedule::StepsizeSchedule(double scale, double offset, double exponent)
    : scale_(scale), offset_(offset), exponent_(exponent) {
  if (!(scale_ > 0.0)) throw std::invalid_argument("stepsize: scale must be positive");
  if (!(offset_ > 0.0)) throw std::invalid_argument("stepsize: offset must be positive");
  if (!(exponent_ > 0.5 && exponent_ <= 1.0)) {
    throw std::invalid_argument("stepsize: exponent must lie in (0.5, 1]");
  }
  if (!(scale_ / std::pow(offset_, exponent_) < 1.0)) {
    throw std::invalid_argument("stepsize: eta(0) = scale / offset^exponent must be < 1");
  }
}

double StepsizeSchedule::operator()(std::int64_t t) const {
  if (t < 0) throw std::invalid_argument("stepsize: t must be >= 0");
  return scale_ / std::pow(static_cast<double>(t) + offset_, exponent_);
}

// ---------------------------------------------------------------------------

void NoiseModel::validate() const {
  switch (kind) {
    case Kind::kNone:
    case Kind::kBinomialFeedback:
      return;
    case Kind::kGaussian:
      if (!(sigma > 0.0)) throw std::invalid_argument("noise: sigma must be positive");
      return;
    case Kind::kTruncatedGaussian:
      if (!(sigma > 0.0)) throw std::invalid_argument("noise: sigma must be positive");
      if (!(clip > 0.0)) throw std::invalid_argument("noise: clip bound must be positive");
      return;
  }
}

Vector NoiseModel::observe(const RewardField& field, const GameAssignment& games,
                           const ActionProfile& actions, const Vector& clean, Rng& rng) const {
  switch (kind) {
    case Kind::kNone:
      return clean;
    case Kind::kGaussian: {
      std::normal_distribution<double> gauss(0.0, sigma);
      Vector y = clean;
      for (Eigen::Index n = 0; n < y.size(); ++n) y[n] += gauss(rng);
      return y;
    }
    case Kind::kTruncatedGaussian: {
      // Rejection keeps the law symmetric, hence zero-mean, and |M| <= clip.
      std::normal_distribution<double> gauss(0.0, sigma);
      Vector y = clean;
      for (Eigen::Index n = 0; n < y.size(); ++n) {
        double m = gauss(rng);
        while (std::abs(m) > clip) m = gauss(rng);
        y[n] += m;
      }
      return y;
    }
    case Kind::kBinomialFeedback:
      return field.sample_feedback(games, actions, rng);
  }
  return clean;
}

std::string to_string(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::kNone: return "none";
    case NoiseModel::Kind::kGaussian: return "gaussian";
    case NoiseModel::Kind::kTruncatedGaussian: return "truncated_gaussian";
    case NoiseModel::Kind::kBinomialFeedback: return "binomial_feedback";
  }
  return "none";
}

NoiseModel::Kind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseModel::Kind::kNone;
  if (name == "gaussian") return NoiseModel::Kind::kGaussian;
  if (name == "truncated_gaussian") return NoiseModel::Kind::kTruncatedGaussian;
  if (name == "binomial_feedback") return NoiseModel::Kind::kBinomialFeedback;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kToP: return "top";
    case Algorithm::kFDToP: return "fdtop";
    case Algorithm::kMetaToP: return "metatop";
  }
  return "top";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "top") return Algorithm::kToP;
  if (name == "fdtop") return Algorithm::kFDToP;
  if (name == "metatop") return Algorithm::kMetaToP;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

void SwitchProbabilities::validate() const {
  if (!(phi > 0.0 && phi <= rho && rho < 1.0)) {
    throw std::invalid_argument("switching: need 0 < phi <= rho < 1");
  }
}

LearnerState LearnerState::initial(const RandomizedTargets& targets, const Bounds& bounds,
                                   GameAssignment games) {
  const auto n = targets.lambda_bar.size();
  if (bounds.upper.size() != n || games.size() != n) {
    throw std::invalid_argument("learner state: dimension mismatch");
  }
  return {ActionProfile::Zero(n), std::move(games), targets.lambda_bar, bounds.upper};
}

// ---------------------------------------------------------------------------

namespace {

void require_single_game(const LearnerState& state, const RewardField& field,
                         const char* who) {
  if (field.n_games() != 1 || (state.games.size() > 0 && state.games.maxCoeff() != 0)) {
    throw std::invalid_argument(std::string(who) + " requires a single game (K = 1)");
  }
}

// Steps (1)-(2) shared by every variant: observe, then projected update.
// Boundary hitters are the players whose projected action equals B_n.
RoundOutcome play_and_update(const LearnerState& state, const RewardField& field,
                             const StepsizeSchedule& schedule, const NoiseModel& noise,
                             std::int64_t t, Rng& noise_rng) {
  RoundOutcome out;
  out.clean_reward = field.evaluate(state.games, state.actions);
  out.observed_reward =
      noise.observe(field, state.games, state.actions, out.clean_reward, noise_rng);
  const double eta = schedule(t);
  out.next = state;
  out.next.actions =
      project_box(state.actions + eta * (state.targets - out.observed_reward), state.bounds);
  for (int n = 0; n < state.n_players(); ++n) {
    if (out.next.actions[n] == state.bounds[n]) out.events.boundary_hitters.push_back(n);
  }
  return out;
}

}  // namespace

RoundOutcome top_round(const LearnerState& state, const RewardField& field,
                       const StepsizeSchedule& schedule, const NoiseModel& noise,
                       std::int64_t t, Rng& noise_rng) {
  require_single_game(state, field, "ToP");
  RoundOutcome out = play_and_update(state, field, schedule, noise, t, noise_rng);
  if (!out.events.boundary_hitters.empty()) {
    // One game: s reaches everybody, hitters included.
    out.events.s_recipients.resize(state.n_players());
    for (int n = 0; n < state.n_players(); ++n) out.events.s_recipients[n] = n;
    out.events.r_broadcast = true;
    out.events.resets_applied = true;
    out.next.actions.setZero();
  }
  return out;
}

RoundOutcome fdtop_round(const LearnerState& state, const RewardField& field,
                         const StepsizeSchedule& schedule, const NoiseModel& noise,
                         std::int64_t t, Rng& noise_rng) {
  require_single_game(state, field, "FDToP");
  RoundOutcome out = play_and_update(state, field, schedule, noise, t, noise_rng);
  // Clamped players stay at B_n; nobody is told.
  out.events.boundary_hitters.clear();
  return out;
}

RoundOutcome metatop_round(const LearnerState& state, const RewardField& field,
                           const StepsizeSchedule& schedule, const NoiseModel& noise,
                           const SwitchProbabilities& switching, std::int64_t t,
                           Rng& noise_rng, Rng& switch_rng) {
  const int n_games = field.n_games();
  if (n_games < 2) throw std::invalid_argument("Meta-ToP requires K >= 2 games");
  check_assignment(state.games, state.n_players(), n_games);

  RoundOutcome out = play_and_update(state, field, schedule, noise, t, noise_rng);
  RoundEvents& ev = out.events;
  if (ev.boundary_hitters.empty()) return out;

  std::vector<bool> signalled_game(n_games, false);
  for (int h : ev.boundary_hitters) signalled_game[state.games[h]] = true;
  std::vector<bool> got_s(state.n_players(), false);
  for (int n = 0; n < state.n_players(); ++n) {
    if (signalled_game[state.games[n]]) {
      got_s[n] = true;
      ev.s_recipients.push_back(n);
    }
  }
  ev.r_broadcast = true;
  ev.resets_applied = true;
  out.next.actions.setZero();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> other(0, n_games - 2);
  for (int n = 0; n < state.n_players(); ++n) {
    const double p = got_s[n] ? switching.rho : switching.phi;
    if (unit(switch_rng) < p) {
      const int current = state.games[n];
      const int pick = other(switch_rng);
      const int dest = pick < current ? pick : pick + 1;
      out.next.games[n] = dest;
      ev.switches.emplace_back(n, dest);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Trace run_simulation(Algorithm algorithm, const RewardField& field,
                     const RandomizedTargets& targets, const StepsizeSchedule& schedule,
                     const NoiseModel& noise, const SimulationOptions& options,
                     std::uint64_t seed) {
  if (options.horizon < 0) throw std::invalid_argument("simulation: horizon must be >= 0");
  if (options.record_stride < 1) throw std::invalid_argument("simulation: record stride must be >= 1");
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
    throw std::invalid_argument("simulation: tail fraction must lie in (0, 1]");
  }
  noise.validate();
  if (noise.kind == NoiseModel::Kind::kBinomialFeedback && !field.has_structural_feedback()) {
    throw std::invalid_argument("simulation: " + field.kind() +
                                " has no binomial feedback model");
  }
  const int n_players = field.n_players();
  if (targets.lambda_bar.size() != n_players) {
    throw std::invalid_argument("simulation: targets length != players");
  }

  Rng noise_rng = make_stream(seed, Stream::kNoise);
  Rng switch_rng = make_stream(seed, Stream::kSwitching);

  GameAssignment games = GameAssignment::Zero(n_players);
  if (algorithm == Algorithm::kMetaToP) {
    if (field.n_games() < 2) throw std::invalid_argument("Meta-ToP requires K >= 2 games");
    options.switching.validate();
    if (options.initial_games) {
      games = *options.initial_games;
    } else {
      Rng init_rng = make_stream(seed, Stream::kInitialGames);
      std::uniform_int_distribution<int> pick(0, field.n_games() - 1);
      for (int n = 0; n < n_players; ++n) games[n] = pick(init_rng);
    }
    check_assignment(games, n_players, field.n_games());
  } else if (field.n_games() != 1) {
    throw std::invalid_argument(to_string(algorithm) + " requires a single game (K = 1), got K = " +
                                std::to_string(field.n_games()));
  }

  Trace trace;
  trace.seed = seed;
  trace.algorithm = algorithm;
  trace.targets = targets.lambda_bar;
  trace.horizon = options.horizon;
  trace.fingerprint = field.kind() + ":N=" + std::to_string(n_players) +
                      ":K=" + std::to_string(field.n_games());
  trace.records.reserve(static_cast<std::size_t>(
      options.horizon == 0 ? 0 : (options.horizon - 1) / options.record_stride + 1));

  LearnerState state = LearnerState::initial(targets, field.bounds(), games);
  TraceSummary& summary = trace.summary;
  const std::int64_t tail_len =
      options.horizon == 0
          ? 0
          : std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::ceil(options.tail_fraction * options.horizon)));
  summary.tail_begin = options.horizon - tail_len;
  summary.tail_mean_actions = Vector::Zero(n_players);
  summary.tail_mean_reward = Vector::Zero(n_players);

  for (std::int64_t t = 0; t < options.horizon; ++t) {
    RoundOutcome out;
    switch (algorithm) {
      case Algorithm::kToP:
        out = top_round(state, field, schedule, noise, t, noise_rng);
        break;
      case Algorithm::kFDToP:
        out = fdtop_round(state, field, schedule, noise, t, noise_rng);
        break;
      case Algorithm::kMetaToP:
        out = metatop_round(state, field, schedule, noise, options.switching, t, noise_rng,
                            switch_rng);
        break;
    }

    if (t >= summary.tail_begin) {
      summary.tail_mean_actions += state.actions;
      summary.tail_mean_reward += out.clean_reward;
      summary.tail_mean_min_reward += out.clean_reward.minCoeff();
    }
    if (out.events.resets_applied) {
      ++summary.reset_count;
      summary.last_reset_round = t;
    }
    if (!out.events.switches.empty()) {
      ++summary.switch_count;
      summary.last_switch_round = t;
    }
    if (t % options.record_stride == 0) {
      RoundRecord rec;
      rec.t = t;
      rec.actions = state.actions;
      rec.games = state.games;
      rec.clean_reward = std::move(out.clean_reward);
      rec.observed_reward = std::move(out.observed_reward);
      rec.reset = out.events.resets_applied;
      rec.switched.setConstant(n_players, false);
      for (const auto& [player, dest] : out.events.switches) rec.switched[player] = true;
      trace.records.push_back(std::move(rec));
    }
    state = std::move(out.next);
  }

  if (tail_len > 0) {
    summary.tail_mean_actions /= static_cast<double>(tail_len);
    summary.tail_mean_reward /= static_cast<double>(tail_len);
    summary.tail_mean_min_reward /= static_cast<double>(tail_len);
  }
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace tow
