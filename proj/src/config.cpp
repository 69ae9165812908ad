#include "tow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tow {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kPowerControl: return "power_control";
    case ScenarioKind::kTaskAllocation: return "task_allocation";
    case ScenarioKind::kSensorActivation: return "sensor_activation";
  }
  return "power_control";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "power_control") return ScenarioKind::kPowerControl;
  if (name == "task_allocation") return ScenarioKind::kTaskAllocation;
  if (name == "sensor_activation") return ScenarioKind::kSensorActivation;
  throw std::invalid_argument("unknown scenario kind '" + name + "'");
}

std::string to_string(InstanceFilter filter) {
  switch (filter) {
    case InstanceFilter::kNone: return "none";
    case InstanceFilter::kFeasible: return "feasible";
    case InstanceFilter::kSplit: return "split";
  }
  return "none";
}

InstanceFilter instance_filter_from_string(const std::string& name) {
  if (name == "none") return InstanceFilter::kNone;
  if (name == "feasible") return InstanceFilter::kFeasible;
  if (name == "split") return InstanceFilter::kSplit;
  throw std::invalid_argument("unknown instance filter '" + name + "'");
}

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown fields.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return node_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "wrong type");
    }
  }

  Vector vector_or_scalar(const std::string& key, int size, Vector fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (v.is_number()) return Vector::Constant(size, v.get<double>());
    return to_vector(v, key);
  }

  Vector to_vector(const json& v, const std::string& key) {
    if (!v.is_array()) fail(key, "expected an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].is_boolean()) {
        out[static_cast<Eigen::Index>(i)] = v[i].get<bool>() ? 1.0 : 0.0;
      } else if (v[i].is_number()) {
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
      } else {
        fail(key, "expected an array of numbers");
      }
    }
    return out;
  }

  Matrix to_matrix(const json& v, const std::string& key) {
    if (!v.is_array() || v.empty() || !v[0].is_array()) fail(key, "expected a 2-D array");
    const auto rows = v.size();
    const auto cols = v[0].size();
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      if (!v[i].is_array() || v[i].size() != cols) fail(key, "ragged 2-D array");
      for (std::size_t j = 0; j < cols; ++j) {
        if (v[i][j].is_boolean()) {
          out(i, j) = v[i][j].get<bool>() ? 1.0 : 0.0;
        } else if (v[i][j].is_number()) {
          out(i, j) = v[i][j].get<double>();
        } else {
          fail(key, "expected numbers");
        }
      }
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) fail(key, "unknown field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
    throw ConfigError(where + ": " + what);
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <typename Derived>
json matrix_json(const Eigen::DenseBase<Derived>& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

void parse_instance(Section& scenario, ScenarioConfig& out) {
  if (!scenario.has("instance")) return;
  Section inst(scenario.raw("instance"), "scenario.instance");
  switch (out.kind) {
    case ScenarioKind::kPowerControl: {
      PowerControlInstance p;
      if (!inst.has("gains")) inst.fail("gains", "required for a pinned instance");
      p.gains = inst.to_matrix(inst.raw("gains"), "gains");
      p.noise_floor = inst.get<double>("noise_floor", out.noise_floor);
      out.power = std::move(p);
      break;
    }
    case ScenarioKind::kTaskAllocation: {
      TaskAllocationInstance t;
      if (!inst.has("alpha") || !inst.has("beta")) {
        inst.fail("", "alpha and beta are required for a pinned instance");
      }
      t.alpha = inst.to_vector(inst.raw("alpha"), "alpha");
      t.beta = inst.to_matrix(inst.raw("beta"), "beta");
      out.task = std::move(t);
      break;
    }
    case ScenarioKind::kSensorActivation: {
      SensorNetworkInstance s;
      if (!inst.has("adjacency") || !inst.has("sink_link")) {
        inst.fail("", "adjacency and sink_link are required for a pinned instance");
      }
      s.adjacency = inst.to_matrix(inst.raw("adjacency"), "adjacency").array() != 0.0;
      s.sink_link = inst.to_vector(inst.raw("sink_link"), "sink_link").array() != 0.0;
      out.sensor = std::move(s);
      break;
    }
  }
  inst.finish();
}

}  // namespace

void ExperimentConfig::validate() const {
  const ScenarioConfig& s = scenario;
  if (s.players < 1) invalid("scenario.players", "must be >= 1");
  if (s.games < 1) invalid("scenario.games", "must be >= 1");
  if (!(s.bound > 0.0)) invalid("scenario.bound", "must be positive");
  if (!(s.noise_floor > 0.0)) invalid("scenario.noise_floor", "must be positive");
  if (s.max_attempts < 1) invalid("scenario.max_attempts", "must be >= 1");
  if (s.kind == ScenarioKind::kSensorActivation) {
    if (s.games != 1) invalid("scenario.games", "sensor activation is a single game");
    if (s.players > kMaxEnumeratedSensors) {
      invalid("scenario.players", "sensor activation supports at most " +
                                      std::to_string(kMaxEnumeratedSensors) + " sensors");
    }
    if (s.bound > 1.0) invalid("scenario.bound", "off-probability bound must be <= 1");
    if (!(s.edge_prob >= 0.0 && s.edge_prob <= 1.0)) invalid("scenario.edge_prob", "must lie in [0, 1]");
    if (s.packets < 1) invalid("scenario.packets", "must be >= 1");
  }
  if (s.filter == InstanceFilter::kSplit && s.games < 2) {
    invalid("scenario.filter", "'split' needs games >= 2");
  }
  try {
    if (s.power) {
      s.power->validate();
      if (s.power->n_players() != s.players) invalid("scenario.instance", "size != players");
    }
    if (s.task) {
      s.task->validate();
      if (s.task->n_players() != s.players || s.task->n_tasks() != s.games) {
        invalid("scenario.instance", "beta must be players x games");
      }
    }
    if (s.sensor) {
      SensorNetworkInstance probe = *s.sensor;
      probe.validate();
      if (probe.n_sensors() != s.players) invalid("scenario.instance", "size != players");
    }
  } catch (const std::invalid_argument& e) {
    invalid("scenario.instance", e.what());
  }

  if (algorithm == Algorithm::kMetaToP) {
    if (s.games < 2) invalid("algorithm.name", "metatop needs games >= 2");
    if (!(switching.phi > 0.0 && switching.phi <= switching.rho && switching.rho < 1.0)) {
      invalid("algorithm", "need 0 < phi <= rho < 1");
    }
  } else if (s.games != 1) {
    invalid("algorithm.name", to_string(algorithm) + " needs games = 1");
  }

  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    invalid("noise", e.what());
  }
  if (noise.kind == NoiseModel::Kind::kBinomialFeedback &&
      s.kind != ScenarioKind::kSensorActivation) {
    invalid("noise.kind", "binomial_feedback is only defined for sensor_activation");
  }

  if (qos.lambda.size() != s.players) invalid("qos.lambda", "length must equal players");
  if (!(qos.lambda.array() > 0.0).all()) invalid("qos.lambda", "must be positive");
  if (!(qos.delta > 0.0)) invalid("qos.delta", "must be positive");
  if (lambda_bar) {
    if (lambda_bar->size() != s.players) invalid("qos.lambda_bar", "length must equal players");
    if (!((lambda_bar->array() >= qos.lambda.array()) &&
          (lambda_bar->array() <= qos.lambda.array() + qos.delta))
             .all()) {
      invalid("qos.lambda_bar", "must lie in [lambda, lambda + delta]");
    }
  }

  if (horizon < 1) invalid("run.horizon", "must be >= 1");
  if (realizations < 1) invalid("run.realizations", "must be >= 1");
  if (record_stride < 1) invalid("run.record_stride", "must be >= 1");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) invalid("run.tail_fraction", "must lie in (0, 1]");
  if (threads < 1) invalid("run.threads", "must be >= 1");

  for (const auto& m : metrics) {
    if (m != "min_reward" && m != "total_action" && m != "reward") {
      invalid("output.metrics", "unknown metric '" + m + "'");
    }
  }
  if (!(check.min_pass_fraction >= 0.0 && check.min_pass_fraction <= 1.0)) {
    invalid("check.min_pass_fraction", "must lie in [0, 1]");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("syntax error: ") + e.what());
  }
  Section top(root, "");
  ExperimentConfig cfg;
  ScenarioConfig& sc = cfg.scenario;

  if (!top.has("scenario")) top.fail("scenario", "required");
  {
    Section s(top.raw("scenario"), "scenario");
    try {
      sc.kind = scenario_kind_from_string(s.get<std::string>("kind", "power_control"));
    } catch (const std::invalid_argument& e) {
      s.fail("kind", e.what());
    }
    parse_instance(s, sc);
    int inferred_players = 4;
    int inferred_games = 1;
    if (sc.power) inferred_players = sc.power->n_players();
    if (sc.task) {
      inferred_players = sc.task->n_players();
      inferred_games = sc.task->n_tasks();
    }
    if (sc.sensor) inferred_players = sc.sensor->n_sensors();
    if (sc.kind == ScenarioKind::kSensorActivation && !sc.sensor) inferred_players = 10;
    sc.players = s.get<int>("players", inferred_players);
    sc.games = s.get<int>("games", inferred_games);
    sc.bound = s.get<double>("bound", sc.kind == ScenarioKind::kTaskAllocation ? 10.0 : 1.0);
    sc.noise_floor = s.get<double>("noise_floor", 0.1);
    if (sc.power && !s.has("noise_floor")) sc.noise_floor = sc.power->noise_floor;
    if (sc.power) sc.power->noise_floor = sc.noise_floor;
    sc.edge_prob = s.get<double>("edge_prob", 0.2);
    sc.packets = s.get<int>("packets", 100);
    sc.value_scale = s.get<double>("value_scale", 0.8);
    sc.offset = s.get<double>("offset", 0.8);
    sc.energy_weight = s.get<double>("energy_weight", 2.0);
    try {
      sc.filter = instance_filter_from_string(s.get<std::string>("filter", "none"));
    } catch (const std::invalid_argument& e) {
      s.fail("filter", e.what());
    }
    sc.max_attempts = s.get<std::int64_t>("max_attempts", 1000000);
    if (sc.sensor) {
      sc.sensor->packets_per_round = sc.packets;
      sc.sensor->value_scale = sc.value_scale;
      sc.sensor->offset = sc.offset;
      sc.sensor->energy_weight = sc.energy_weight;
    }
    s.finish();
  }

  {
    const std::string fallback = sc.games > 1 ? "metatop" : "top";
    if (top.has("algorithm")) {
      Section a(top.raw("algorithm"), "algorithm");
      try {
        cfg.algorithm = algorithm_from_string(a.get<std::string>("name", fallback));
      } catch (const std::invalid_argument& e) {
        a.fail("name", e.what());
      }
      cfg.switching.rho = a.get<double>("rho", 0.2);
      cfg.switching.phi = a.get<double>("phi", 0.1);
      a.finish();
    } else {
      cfg.algorithm = algorithm_from_string(fallback);
    }
  }

  if (top.has("schedule")) {
    Section s(top.raw("schedule"), "schedule");
    const double scale = s.get<double>("scale", 1.0);
    const double offset = s.get<double>("offset", 100.0);
    const double exponent = s.get<double>("exponent", 1.0);
    s.finish();
    try {
      cfg.schedule = StepsizeSchedule(scale, offset, exponent);
    } catch (const std::invalid_argument& e) {
      s.fail("", e.what());
    }
  }

  {
    const bool sensor = sc.kind == ScenarioKind::kSensorActivation;
    cfg.noise = sensor ? NoiseModel::binomial_feedback() : NoiseModel::gaussian(0.1);
    if (top.has("noise")) {
      Section n(top.raw("noise"), "noise");
      try {
        cfg.noise.kind = noise_kind_from_string(
            n.get<std::string>("kind", to_string(cfg.noise.kind)));
      } catch (const std::invalid_argument& e) {
        n.fail("kind", e.what());
      }
      const bool additive = cfg.noise.kind == NoiseModel::Kind::kGaussian ||
                            cfg.noise.kind == NoiseModel::Kind::kTruncatedGaussian;
      cfg.noise.sigma = n.get<double>("sigma", additive ? 0.1 : 0.0);
      cfg.noise.clip = n.get<double>(
          "clip", cfg.noise.kind == NoiseModel::Kind::kTruncatedGaussian ? 4.0 * cfg.noise.sigma : 0.0);
      n.finish();
    }
  }

  {
    double default_lambda = 0.1;
    if (sc.kind == ScenarioKind::kTaskAllocation) default_lambda = 0.8;
    if (sc.kind == ScenarioKind::kSensorActivation) default_lambda = 0.15;
    cfg.qos.lambda = Vector::Constant(std::max(sc.players, 0), default_lambda);
    cfg.qos.delta = 0.01;
    if (top.has("qos")) {
      Section q(top.raw("qos"), "qos");
      cfg.qos.lambda = q.vector_or_scalar("lambda", sc.players, cfg.qos.lambda);
      cfg.qos.delta = q.get<double>("delta", 0.01);
      if (q.has("lambda_bar")) {
        cfg.lambda_bar = q.vector_or_scalar("lambda_bar", sc.players, Vector());
      }
      q.finish();
    }
  }

  if (top.has("run")) {
    Section r(top.raw("run"), "run");
    cfg.horizon = r.get<std::int64_t>("horizon", cfg.horizon);
    cfg.realizations = r.get<int>("realizations", cfg.realizations);
    cfg.seed = r.get<std::uint64_t>("seed", cfg.seed);
    cfg.record_stride = r.get<std::int64_t>("record_stride", cfg.record_stride);
    cfg.tail_fraction = r.get<double>("tail_fraction", cfg.tail_fraction);
    cfg.threads = r.get<int>("threads", cfg.threads);
    r.finish();
  }

  if (top.has("output")) {
    Section o(top.raw("output"), "output");
    cfg.output_dir = o.get<std::string>("dir", cfg.output_dir);
    cfg.write_traces = o.get<bool>("traces", cfg.write_traces);
    cfg.metrics = o.get<std::vector<std::string>>("metrics", cfg.metrics);
    o.finish();
  }

  if (top.has("check")) {
    Section c(top.raw("check"), "check");
    cfg.check.action_tol = c.get<double>("action_tol", cfg.check.action_tol);
    cfg.check.reward_tol = c.get<double>("reward_tol", cfg.check.reward_tol);
    cfg.check.min_pass_fraction = c.get<double>("min_pass_fraction", cfg.check.min_pass_fraction);
    c.finish();
  }

  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  json scenario = {
      {"kind", to_string(sc.kind)},
      {"players", sc.players},
      {"games", sc.games},
      {"bound", sc.bound},
      {"noise_floor", sc.noise_floor},
      {"edge_prob", sc.edge_prob},
      {"packets", sc.packets},
      {"value_scale", sc.value_scale},
      {"offset", sc.offset},
      {"energy_weight", sc.energy_weight},
      {"filter", to_string(sc.filter)},
      {"max_attempts", sc.max_attempts},
  };
  if (sc.power) {
    scenario["instance"] = {{"gains", matrix_json(sc.power->gains)},
                            {"noise_floor", sc.power->noise_floor}};
  } else if (sc.task) {
    scenario["instance"] = {{"alpha", vector_json(sc.task->alpha)},
                            {"beta", matrix_json(sc.task->beta)}};
  } else if (sc.sensor) {
    scenario["instance"] = {{"adjacency", matrix_json(sc.sensor->adjacency)},
                            {"sink_link", matrix_json(sc.sensor->sink_link.transpose())[0]}};
  }

  json qos = {{"lambda", vector_json(cfg.qos.lambda)}, {"delta", cfg.qos.delta}};
  if (cfg.lambda_bar) qos["lambda_bar"] = vector_json(*cfg.lambda_bar);

  json root = {
      {"scenario", scenario},
      {"algorithm",
       {{"name", to_string(cfg.algorithm)},
        {"rho", cfg.switching.rho},
        {"phi", cfg.switching.phi}}},
      {"schedule",
       {{"scale", cfg.schedule.scale()},
        {"offset", cfg.schedule.offset()},
        {"exponent", cfg.schedule.exponent()}}},
      {"noise",
       {{"kind", to_string(cfg.noise.kind)}, {"sigma", cfg.noise.sigma}, {"clip", cfg.noise.clip}}},
      {"qos", qos},
      {"run",
       {{"horizon", cfg.horizon},
        {"realizations", cfg.realizations},
        {"seed", cfg.seed},
        {"record_stride", cfg.record_stride},
        {"tail_fraction", cfg.tail_fraction},
        {"threads", cfg.threads}}},
      {"output",
       {{"dir", cfg.output_dir}, {"traces", cfg.write_traces}, {"metrics", cfg.metrics}}},
      {"check",
       {{"action_tol", cfg.check.action_tol},
        {"reward_tol", cfg.check.reward_tol},
        {"min_pass_fraction", cfg.check.min_pass_fraction}}},
  };
  return root.dump(2);
}

}  // namespace tow
