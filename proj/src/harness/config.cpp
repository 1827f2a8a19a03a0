#include "amwu/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "amwu/errors.hpp"

namespace amwu::harness {

using nlohmann::json;

namespace {

std::vector<std::vector<double>> blocks_of(const ProductPoint& p) {
  std::vector<std::vector<double>> out;
  for (const auto& b : p.blocks()) out.emplace_back(b.weights().data(), b.weights().data() + b.dim());
  return out;
}

ProductPoint from_blocks(const std::vector<std::vector<double>>& blocks, const char* what) {
  if (blocks.empty()) throw ConfigError(std::string(what) + ": no blocks");
  std::vector<SimplexPoint> out;
  for (const auto& b : blocks) {
    Vector w = Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size()));
    if (w.size() < 2 || !(w.minCoeff() > 0.0)) throw ConfigError(std::string(what) + ": blocks need >= 2 positive weights");
    out.push_back(SimplexPoint::normalized(w));
  }
  return ProductPoint(std::move(out));
}

json params_json(const ScheduleParams& p) {
  json j{{"alpha", p.alpha}, {"beta", p.beta}, {"mu", p.mu}};
  j["lipschitz"] = std::isinf(p.lipschitz) ? json(nullptr) : json(p.lipschitz);
  return j;
}

ScheduleParams params_from(const json& j, ScheduleParams p) {
  if (j.contains("alpha")) p.alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) p.beta = j.at("beta").get<double>();
  if (j.contains("mu")) p.mu = j.at("mu").get<double>();
  if (j.contains("lipschitz")) {
    p.lipschitz = j.at("lipschitz").is_null() ? std::numeric_limits<double>::infinity() : j.at("lipschitz").get<double>();
  }
  return p;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

}  // namespace

std::vector<std::string> preset_names() { return corpus_names(); }

ExperimentConfig preset(const std::string& name) {
  PaperSetting s = [&] {
    try {
      return paper_setting(name);
    } catch (const InvalidArgument&) {
      throw ConfigError("unknown preset '" + name + "'");
    }
  }();
  ExperimentConfig cfg;
  cfg.objective = name;
  cfg.algorithms = {"amwu_ragd", "mwu", "amd:3"};
  cfg.params = s.params;
  cfg.x0 = blocks_of(s.x0);
  cfg.max_iters = s.iterations;
  return cfg;
}

json to_json(const ExperimentConfig& c, bool embedded) {
  json j;
  j["objective"] = c.objective;
  j["algorithms"] = c.algorithms;
  j["mode"] = to_string(c.mode);
  j["params"] = params_json(c.params);
  json agents = json::array();
  for (const auto& p : c.agent_params) agents.push_back(params_json(p));
  j["agent_params"] = agents;
  j["r"] = c.r;
  j["amd_step"] = opt(c.amd_step);
  j["gamma0"] = opt(c.gamma0);
  j["literal"] = {{"log_normalizer_from_v", c.literal.log_normalizer_from_v},
                  {"weighted_denominator", c.literal.weighted_denominator}};
  j["x0"] = c.x0;
  j["v0"] = opt(c.v0);
  j["max_iters"] = c.max_iters;
  j["grad_tol"] = c.grad_tol;
  j["trace_every"] = c.trace_every;
  j["seed"] = c.seed;
  j["threshold"] = opt(c.threshold);
  j["avoidance"] = {{"trials", c.avoidance.trials},
                    {"radius", c.avoidance.radius},
                    {"classify_radius", c.avoidance.classify_radius},
                    {"grid", c.avoidance.grid}};
  if (!embedded) {
    j["avoidance"]["threads"] = c.avoidance.threads;
    j["output"] = {{"dir", c.out_dir}, {"svg", c.svg}};
  }
  return j;
}

ExperimentConfig from_json(const json& in, const ExperimentConfig& base) {
  const json& j = in.contains("config") && in.at("config").is_object() ? in.at("config") : in;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c = base;
  try {
    if (j.contains("objective")) c.objective = j.at("objective").get<std::string>();
    if (j.contains("algorithms")) c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m == "ragd") {
        c.mode = AmwuMode::ragd;
      } else if (m == "literal") {
        c.mode = AmwuMode::literal;
      } else {
        throw ConfigError("mode must be literal or ragd");
      }
    }
    if (j.contains("params")) c.params = params_from(j.at("params"), c.params);
    if (j.contains("agent_params")) {
      c.agent_params.clear();
      for (const auto& a : j.at("agent_params")) c.agent_params.push_back(params_from(a, c.params));
    }
    if (j.contains("r")) c.r = j.at("r").get<double>();
    read_opt(j, "amd_step", c.amd_step);
    read_opt(j, "gamma0", c.gamma0);
    if (j.contains("literal")) {
      const auto& l = j.at("literal");
      if (l.contains("log_normalizer_from_v")) c.literal.log_normalizer_from_v = l.at("log_normalizer_from_v").get<bool>();
      if (l.contains("weighted_denominator")) c.literal.weighted_denominator = l.at("weighted_denominator").get<bool>();
    }
    if (j.contains("x0")) c.x0 = j.at("x0").get<std::vector<std::vector<double>>>();
    read_opt(j, "v0", c.v0);
    if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<long>();
    if (j.contains("grad_tol")) c.grad_tol = j.at("grad_tol").get<double>();
    if (j.contains("trace_every")) c.trace_every = j.at("trace_every").get<long>();
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned long long>();
    read_opt(j, "threshold", c.threshold);
    if (j.contains("avoidance")) {
      const auto& a = j.at("avoidance");
      if (a.contains("trials")) c.avoidance.trials = a.at("trials").get<long>();
      if (a.contains("radius")) c.avoidance.radius = a.at("radius").get<double>();
      if (a.contains("classify_radius")) c.avoidance.classify_radius = a.at("classify_radius").get<double>();
      if (a.contains("grid")) c.avoidance.grid = a.at("grid").get<int>();
      if (a.contains("threads")) c.avoidance.threads = a.at("threads").get<int>();
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
      if (o.contains("svg")) c.svg = o.at("svg").get<bool>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return from_json(j, base);
}

std::vector<ScheduleParams> schedule_params(const ExperimentConfig& cfg) {
  return cfg.agent_params.empty() ? std::vector<ScheduleParams>{cfg.params} : cfg.agent_params;
}

ProductPoint starting_point(const ExperimentConfig& cfg) { return from_blocks(cfg.x0, "x0"); }

std::optional<ProductPoint> starting_aux(const ExperimentConfig& cfg) {
  if (!cfg.v0) return std::nullopt;
  return from_blocks(*cfg.v0, "v0");
}

AlgorithmSpec parse_algorithm(const std::string& name, const ExperimentConfig& cfg) {
  AlgorithmSpec a;
  a.params = schedule_params(cfg);
  a.gamma0 = cfg.gamma0;
  a.literal = cfg.literal;
  a.r = cfg.r;
  if (name == "mwu") {
    a.kind = AlgorithmKind::mwu;
  } else if (name == "amwu") {
    a.kind = cfg.mode == AmwuMode::ragd ? AlgorithmKind::amwu_ragd : AlgorithmKind::amwu_literal;
  } else if (name == "amwu_ragd") {
    a.kind = AlgorithmKind::amwu_ragd;
  } else if (name == "amwu_literal") {
    a.kind = AlgorithmKind::amwu_literal;
  } else if (name == "amd" || name.rfind("amd:", 0) == 0) {
    a.kind = AlgorithmKind::amd;
    if (name.size() > 4) {
      std::size_t used = 0;
      try {
        a.r = std::stod(name.substr(4), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != name.size() - 4) throw ConfigError("bad A-MD parameter in '" + name + "'");
    }
    if (cfg.amd_step) {
      for (auto& p : a.params) p.alpha = *cfg.amd_step;
    }
  } else {
    throw ConfigError("unknown algorithm '" + name + "'");
  }
  return a;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  const auto names = corpus_names();
  if (std::find(names.begin(), names.end(), cfg.objective) == names.end()) {
    throw ConfigError("unknown objective '" + cfg.objective + "'");
  }
  if (cfg.algorithms.empty()) throw ConfigError("no algorithms given");
  for (const auto& a : cfg.algorithms) parse_algorithm(a, cfg);
  if (cfg.max_iters < 0) throw ConfigError("max_iters must be non-negative");
  if (cfg.trace_every < 1) throw ConfigError("trace_every must be at least 1");
  if (!(cfg.grad_tol >= 0.0)) throw ConfigError("grad_tol must be non-negative");
  if (cfg.avoidance.trials < 0) throw ConfigError("trials must be non-negative");
  if (!(cfg.avoidance.radius > 0.0)) throw ConfigError("radius must be positive");
  if (cfg.avoidance.threads < 1) throw ConfigError("threads must be at least 1");

  const auto obj = corpus_objective(cfg.objective);
  const auto x0 = starting_point(cfg);
  if (x0.shape() != obj.shape()) throw ConfigError("x0 does not match the objective's block dimensions");
  if (const auto v0 = starting_aux(cfg); v0 && v0->shape() != obj.shape()) {
    throw ConfigError("v0 does not match the objective's block dimensions");
  }
  const auto params = schedule_params(cfg);
  if (params.size() != 1 && params.size() != obj.shape().size()) {
    throw ConfigError("agent_params needs one entry per block");
  }

  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    try {
      amwu::validate(p);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    const auto b = admissible_step_bound(p.beta, p.mu, p.lipschitz);
    std::ostringstream os;
    if (b.mu_warning) {
      os << "agent " << i << ": mu = " << p.mu << " >= 1, the step bound assumes mu < 1";
      warnings.push_back(os.str());
      os.str("");
    }
    if (!(p.alpha < b.bound)) {
      os << "agent " << i << ": alpha = " << p.alpha << " is not below the step bound " << b.bound;
      warnings.push_back(os.str());
    }
  }
  return warnings;
}

}  // namespace amwu::harness
