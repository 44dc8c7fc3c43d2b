#include "blobot/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "blobot/rng.hpp"

namespace blobot {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(path + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing required field");
  if (!obj[key].is_number()) throw ConfigError(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing required field");
  if (!obj[key].is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return obj[key].get<int>();
}

std::vector<std::array<double, 2>> parse_box(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected an array of [lo, hi] pairs");
  std::vector<std::array<double, 2>> box;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) throw ConfigError(path, "each range must be [lo, hi]");
    box.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return box;
}

PointCloud parse_points(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of points");
  const int n = static_cast<int>(j.size());
  const int dim = static_cast<int>(j[0].size());
  if (dim < 1) throw ConfigError(path, "points must have at least one coordinate");
  PointCloud cloud(n, dim);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(j[i].size()) != dim) throw ConfigError(path, "ragged point array");
    for (int c = 0; c < dim; ++c) cloud.point(i)[c] = j[i][c].get<double>();
  }
  return cloud;
}

CloudSpec parse_cloud(const json& j, const std::string& path, bool allow_phase) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError(path, "expected an object with a 'type'");
  const std::string type = j["type"].get<std::string>();
  CloudSpec spec;
  if (type == "grid" || type == "uniform_random") {
    check_keys(j, path, {"type", "box"});
    spec.kind = type == "grid" ? CloudSpec::Kind::kGrid : CloudSpec::Kind::kUniformRandom;
    spec.box = parse_box(j.contains("box") ? j["box"] : json(), path + ".box");
  } else if (type == "points") {
    check_keys(j, path, {"type", "points"});
    spec.kind = CloudSpec::Kind::kPoints;
    spec.points = parse_points(j.contains("points") ? j["points"] : json(), path + ".points");
  } else if (type == "phase_grid" && allow_phase) {
    check_keys(j, path, {"type", "position_range", "velocity_range"});
    spec.kind = CloudSpec::Kind::kPhaseGrid;
    const auto pos = parse_box(json::array({j["position_range"]}), path + ".position_range");
    const auto vel = parse_box(json::array({j["velocity_range"]}), path + ".velocity_range");
    spec.position_range = pos[0];
    spec.velocity_range = vel[0];
  } else {
    throw ConfigError(path + ".type", "unsupported cloud type '" + type + "'");
  }
  return spec;
}

TargetCfg parse_target(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError(path, "expected an object with a 'type'");
  TargetCfg target;
  if (j["type"].get<std::string>() == "gaussian") {
    check_keys(j, path, {"type", "mean", "std"});
    target.gaussian = true;
    if (!j.contains("mean") || !j["mean"].is_array()) throw ConfigError(path + ".mean", "expected an array");
    target.mean = j["mean"].get<std::vector<double>>();
    target.stddev = get_number(j, path, "std");
  } else {
    target.cloud = parse_cloud(j, path, /*allow_phase=*/true);
  }
  return target;
}

AlphaRule parse_alpha(const json& opt, const std::string& path) {
  AlphaRule rule;
  const bool has_value = opt.contains("alpha");
  const bool has_rule = opt.contains("alpha_rule");
  if (has_value == has_rule) throw ConfigError(path, "exactly one of alpha / alpha_rule is required");
  if (has_value) {
    rule.kind = AlphaRule::Kind::kConstant;
    rule.value = get_number(opt, path, "alpha");
    return rule;
  }
  const json& r = opt["alpha_rule"];
  const std::string type = r.value("type", "");
  if (type == "scale_eps") {
    check_keys(r, path + ".alpha_rule", {"type", "c"});
    rule.kind = AlphaRule::Kind::kScaleEps;
    rule.coeff = get_number(r, path + ".alpha_rule", "c");
  } else if (type == "scale_eps_floored") {
    check_keys(r, path + ".alpha_rule", {"type", "c", "floor"});
    rule.kind = AlphaRule::Kind::kScaleEpsFloored;
    rule.coeff = get_number(r, path + ".alpha_rule", "c");
    rule.floor = get_number(r, path + ".alpha_rule", "floor");
  } else {
    throw ConfigError(path + ".alpha_rule.type", "expected scale_eps or scale_eps_floored");
  }
  return rule;
}

json preset_defaults(const std::string& experiment) {
  const json unit_square = json::array({json::array({0.0, 1.0}), json::array({0.0, 1.0})});
  if (experiment == "comparison") {
    return {
        {"mode", "velocity"}, {"n_particles", 30}, {"n_times", 3}, {"dim", 2}, {"epsilon", 0.01},
        {"delta_rule", {{"k", 0.99}}},
        {"source", {{"type", "uniform_random"}, {"box", unit_square}}},
        {"target", {{"type", "uniform_random"},
                    {"box", json::array({json::array({1.0, 2.0}), json::array({1.0, 2.0})})}}},
        {"optimizer", {{"alpha", 0.01}, {"max_steps", 2000}, {"seed", 1}}},
        {"compare_assignment", true},
    };
  }
  if (experiment == "gaussian_target") {
    return {
        {"mode", "velocity"}, {"n_particles", 225}, {"n_times", 5}, {"dim", 2}, {"epsilon", 0.01},
        {"delta_rule", {{"k", 0.99}}},
        {"source", {{"type", "grid"}, {"box", unit_square}}},
        {"target", {{"type", "gaussian"}, {"mean", json::array({1.5, 1.5})}, {"std", 0.5}}},
        {"optimizer",
         {{"alpha_rule", {{"type", "scale_eps"}, {"c", 0.01}}}, {"max_steps", 5000000}, {"seed", 1}}},
    };
  }
  if (experiment == "obstacle") {
    return {
        {"mode", "velocity"}, {"n_particles", 25}, {"n_times", 21}, {"dim", 2}, {"epsilon", 0.1},
        {"delta_rule", {{"k", 0.99}}},
        {"source", {{"type", "grid"}, {"box", unit_square}}},
        {"target", {{"type", "gaussian"}, {"mean", json::array({1.5, 1.7})}, {"std", 0.2}}},
        {"obstacles",
         {{"circles", json::array({json{{"center", json::array({1.0, 1.5})}, {"radius", 0.2}},
                                   json{{"center", json::array({1.25, 1.25})}, {"radius", 0.2}}})},
          {"strength", "default"}}},
        {"optimizer",
         {{"alpha_rule", {{"type", "scale_eps"}, {"c", 0.001}}}, {"max_steps", 200000}, {"seed", 1}}},
    };
  }
  if (experiment == "acceleration") {
    return {
        {"mode", "acceleration"}, {"n_particles", 10}, {"n_times", 11}, {"dim", 1},
        {"epsilon", 1e-4},
        {"delta_rule", {{"k", 0.99}}},
        {"source", {{"type", "grid"}, {"box", json::array({json::array({0.0, 1.0})})}}},
        {"target", {{"type", "phase_grid"}, {"position_range", json::array({2.0, 2.5})},
                    {"velocity_range", json::array({-2.0, 2.0})}}},
        {"initial_velocities", {{"type", "zero"}}},
        {"optimizer",
         {{"alpha_rule", {{"type", "scale_eps"}, {"c", 0.004}}}, {"max_steps", 1000000}, {"seed", 1}}},
        {"compare_assignment", true},
    };
  }
  if (experiment == "landscape") {
    return {
        {"mode", "velocity"}, {"n_particles", 2}, {"n_times", 2}, {"dim", 1}, {"epsilon", 0.01},
        {"delta", 0.1},
        {"source", {{"type", "points"}, {"points", json::array({json::array({0.0}), json::array({0.5})})}}},
        {"target", {{"type", "points"}, {"points", json::array({json::array({1.0}), json::array({1.5})})}}},
        {"optimizer", {{"alpha", 0.01}, {"max_steps", 0}, {"seed", 1}}},
        {"landscape", {{"grid_size", 201}, {"range", json::array({-0.5, 2.5})}}},
    };
  }
  if (experiment == "convergence") {
    return {
        {"mode", "velocity"}, {"n_particles", 5}, {"n_times", 5}, {"dim", 1}, {"epsilon", 0.01},
        {"delta_rule", {{"k", 0.99}}},
        {"source", {{"type", "grid"}, {"box", json::array({json::array({0.0, 1.0})})}}},
        {"target", {{"type", "grid"}, {"box", json::array({json::array({2.0, 2.5})})}}},
        {"optimizer",
         {{"alpha_rule", {{"type", "scale_eps"}, {"c", 0.003}}}, {"max_steps", 2000000}, {"seed", 1}}},
        {"exact_map", "geodesic"},
        {"convergence", {{"n_values", json::array({5, 10, 20, 40, 80, 100})}, {"max_steps", 2000000}}},
    };
  }
  if (experiment == "gradcheck") {
    return {{"gradcheck", {{"instances", 100}, {"seed", 12345}}}};
  }
  if (experiment == "custom") return json::object();
  throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
}

void deep_merge(json& base, const json& over) {
  if (!base.is_object() || !over.is_object()) {
    base = over;
    return;
  }
  for (const auto& [key, value] : over.items()) {
    if (base.contains(key)) {
      deep_merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

}  // namespace

double AlphaRule::resolve(double epsilon) const {
  switch (kind) {
    case Kind::kConstant: return value;
    case Kind::kScaleEps: return coeff * epsilon;
    case Kind::kScaleEpsFloored: return std::max(coeff * epsilon, floor);
  }
  return value;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  const std::string experiment = doc.value("experiment", "custom");
  json merged = preset_defaults(experiment);
  // The user's explicit delta/alpha choice replaces the preset's rule (and vice versa).
  if (doc.contains("delta")) merged.erase("delta_rule");
  if (doc.contains("delta_rule")) merged.erase("delta");
  // Cloud specifications are replaced wholesale, not merged key-by-key: a
  // "points" override must not inherit the preset's "box".
  for (const char* key : {"source", "target", "initial_velocities", "obstacles"}) {
    if (doc.contains(key)) merged.erase(key);
  }
  if (doc.contains("optimizer") && merged.contains("optimizer")) {
    if (doc["optimizer"].contains("alpha")) merged["optimizer"].erase("alpha_rule");
    if (doc["optimizer"].contains("alpha_rule")) merged["optimizer"].erase("alpha");
  }
  deep_merge(merged, doc);

  check_keys(merged, "config",
             {"experiment", "mode", "n_particles", "n_times", "dim", "epsilon", "delta",
              "delta_rule", "source", "target", "obstacles", "initial_velocities", "optimizer",
              "exact_map", "compare_assignment", "landscape", "convergence", "gradcheck",
              "output_dir", "rng_algorithm"});

  ExperimentConfig cfg;
  cfg.experiment = experiment;
  if (experiment == "gradcheck") {
    if (merged.contains("gradcheck")) {
      const json& g = merged["gradcheck"];
      check_keys(g, "config.gradcheck", {"instances", "seed"});
      if (g.contains("instances")) cfg.gradcheck.instances = get_int(g, "config.gradcheck", "instances");
      if (g.contains("seed")) cfg.gradcheck.seed = g["seed"].get<std::uint64_t>();
    }
    if (merged.contains("output_dir")) cfg.output_dir = merged["output_dir"].get<std::string>();
    return cfg;
  }

  const std::string mode = merged.value("mode", "velocity");
  if (mode == "velocity") {
    cfg.mode = ControlMode::kVelocity;
  } else if (mode == "acceleration") {
    cfg.mode = ControlMode::kAcceleration;
  } else {
    throw ConfigError("config.mode", "expected velocity or acceleration");
  }

  cfg.n_particles = get_int(merged, "config", "n_particles");
  cfg.n_times = get_int(merged, "config", "n_times");
  cfg.dim = get_int(merged, "config", "dim");
  cfg.epsilon = get_number(merged, "config", "epsilon");
  if (cfg.n_particles < 1) throw ConfigError("config.n_particles", "must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("config.epsilon", "must be positive");

  const bool has_delta = merged.contains("delta");
  const bool has_rule = merged.contains("delta_rule");
  if (has_delta == has_rule) throw ConfigError("config", "exactly one of delta / delta_rule is required");
  if (has_delta) {
    cfg.delta = merged["delta"].get<double>();
    if (!(*cfg.delta > 0.0)) throw ConfigError("config.delta", "must be positive");
  } else {
    check_keys(merged["delta_rule"], "config.delta_rule", {"k"});
    cfg.delta_rule_k = get_number(merged["delta_rule"], "config.delta_rule", "k");
    if (!(*cfg.delta_rule_k > 0.0 && *cfg.delta_rule_k < 1.0)) {
      throw ConfigError("config.delta_rule.k", "must lie in (0,1)");
    }
  }

  if (!merged.contains("source")) throw ConfigError("config.source", "missing required field");
  cfg.source = parse_cloud(merged["source"], "config.source", /*allow_phase=*/false);
  if (!merged.contains("target")) throw ConfigError("config.target", "missing required field");
  cfg.target = parse_target(merged["target"], "config.target");

  if (merged.contains("obstacles")) {
    const json& obs = merged["obstacles"];
    check_keys(obs, "config.obstacles", {"circles", "strength"});
    if (obs.contains("circles")) {
      for (const auto& circ : obs["circles"]) {
        check_keys(circ, "config.obstacles.circles[]", {"center", "radius"});
        Obstacle o;
        o.center = circ["center"].get<std::vector<double>>();
        o.radius = circ["radius"].get<double>();
        if (!(o.radius > 0.0)) throw ConfigError("config.obstacles.circles[].radius", "must be positive");
        cfg.obstacle_circles.push_back(std::move(o));
      }
    }
    if (obs.contains("strength") && obs["strength"] != "default") {
      if (!obs["strength"].is_number()) {
        throw ConfigError("config.obstacles.strength", "expected a number or \"default\"");
      }
      cfg.obstacle_strength = obs["strength"].get<double>();
      if (*cfg.obstacle_strength < 0.0) throw ConfigError("config.obstacles.strength", "must be >= 0");
    }
  }

  if (merged.contains("initial_velocities")) {
    const json& iv = merged["initial_velocities"];
    check_keys(iv, "config.initial_velocities", {"type", "points"});
    const std::string type = iv.value("type", "zero");
    if (type == "points") {
      cfg.initial_velocities = parse_points(iv["points"], "config.initial_velocities.points");
    } else if (type != "zero") {
      throw ConfigError("config.initial_velocities.type", "expected zero or points");
    }
  }

  if (!merged.contains("optimizer")) throw ConfigError("config.optimizer", "missing required field");
  const json& opt = merged["optimizer"];
  check_keys(opt, "config.optimizer",
             {"alpha", "alpha_rule", "max_steps", "lr_reduce_factor", "lr_reduce_patience",
              "lr_floor", "early_stop_patience", "seed"});
  cfg.alpha = parse_alpha(opt, "config.optimizer");
  if (!opt.contains("max_steps")) throw ConfigError("config.optimizer.max_steps", "missing required field");
  cfg.optimizer.max_steps = opt["max_steps"].get<long>();
  if (cfg.optimizer.max_steps < 0) throw ConfigError("config.optimizer.max_steps", "must be >= 0");
  if (opt.contains("lr_reduce_factor")) cfg.optimizer.lr_reduce_factor = opt["lr_reduce_factor"].get<double>();
  if (opt.contains("lr_reduce_patience")) cfg.optimizer.lr_reduce_patience = opt["lr_reduce_patience"].get<int>();
  if (opt.contains("lr_floor")) cfg.optimizer.lr_floor = opt["lr_floor"].get<double>();
  if (opt.contains("early_stop_patience")) cfg.optimizer.early_stop_patience = opt["early_stop_patience"].get<int>();
  if (opt.contains("seed")) cfg.optimizer.seed = opt["seed"].get<std::uint64_t>();

  if (merged.contains("exact_map")) {
    cfg.exact_map = merged["exact_map"].get<std::string>();
    if (*cfg.exact_map != "geodesic") throw ConfigError("config.exact_map", "only 'geodesic' is supported");
  }
  if (merged.contains("compare_assignment")) cfg.compare_assignment = merged["compare_assignment"].get<bool>();

  if (merged.contains("landscape")) {
    const json& l = merged["landscape"];
    check_keys(l, "config.landscape", {"grid_size", "range"});
    if (l.contains("grid_size")) cfg.landscape.grid_size = l["grid_size"].get<int>();
    if (cfg.landscape.grid_size < 2) throw ConfigError("config.landscape.grid_size", "must be >= 2");
    if (l.contains("range")) {
      const auto r = l["range"].get<std::vector<double>>();
      if (r.size() != 2 || !(r[0] < r[1])) throw ConfigError("config.landscape.range", "expected [lo, hi]");
      cfg.landscape.range = {r[0], r[1]};
    }
  }

  if (merged.contains("convergence")) {
    const json& cv = merged["convergence"];
    check_keys(cv, "config.convergence", {"n_values", "max_steps"});
    if (cv.contains("n_values")) {
      cfg.convergence.n_values = cv["n_values"].get<std::vector<int>>();
      if (cfg.convergence.n_values.size() < 2) {
        throw ConfigError("config.convergence.n_values", "need at least two particle counts");
      }
    }
    if (cv.contains("max_steps")) cfg.convergence.max_steps = cv["max_steps"].get<long>();
  }

  if (merged.contains("output_dir")) cfg.output_dir = merged["output_dir"].get<std::string>();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(doc);
}

namespace {

PointCloud make_grid(const std::vector<std::array<double, 2>>& box, int n, const std::string& path) {
  const int dim = static_cast<int>(box.size());
  int side = n;
  if (dim > 1) {
    side = static_cast<int>(std::llround(std::pow(static_cast<double>(n), 1.0 / dim)));
    bool ok = false;
    for (int s = std::max(1, side - 1); s <= side + 1; ++s) {
      int p = 1;
      for (int c = 0; c < dim; ++c) p *= s;
      if (p == n) {
        side = s;
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(path, "grid sources require n_particles to be a perfect d-th power");
  }
  PointCloud cloud(n, dim);
  for (int i = 0; i < n; ++i) {
    int rem = i;
    for (int c = dim - 1; c >= 0; --c) {
      const int idx = rem % side;
      rem /= side;
      const double t = side == 1 ? 0.5 : static_cast<double>(idx) / (side - 1);
      cloud.point(i)[c] = box[c][0] + t * (box[c][1] - box[c][0]);
    }
  }
  return cloud;
}

PointCloud make_uniform_random(const std::vector<std::array<double, 2>>& box, int n, Rng& rng) {
  const int dim = static_cast<int>(box.size());
  PointCloud cloud(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) cloud.point(i)[c] = rng.uniform(box[c][0], box[c][1]);
  }
  return cloud;
}

PointCloud make_phase_grid(const CloudSpec& spec, int n) {
  PointCloud cloud(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
    cloud.point(i)[0] = spec.position_range[0] + t * (spec.position_range[1] - spec.position_range[0]);
    cloud.point(i)[1] = spec.velocity_range[0] + t * (spec.velocity_range[1] - spec.velocity_range[0]);
  }
  return cloud;
}

PointCloud materialize(const CloudSpec& spec, int n, Rng& rng, const std::string& path) {
  switch (spec.kind) {
    case CloudSpec::Kind::kGrid: return make_grid(spec.box, n, path);
    case CloudSpec::Kind::kUniformRandom: return make_uniform_random(spec.box, n, rng);
    case CloudSpec::Kind::kPoints:
      if (spec.points.n != n) throw ConfigError(path, "explicit point count disagrees with n_particles");
      return spec.points;
    case CloudSpec::Kind::kPhaseGrid: return make_phase_grid(spec, n);
  }
  throw ConfigError(path, "unreachable cloud kind");
}

json cloud_to_json(const PointCloud& cloud) {
  json points = json::array();
  for (int i = 0; i < cloud.n; ++i) {
    json p = json::array();
    for (int c = 0; c < cloud.dim; ++c) p.push_back(cloud.point(i)[c]);
    points.push_back(std::move(p));
  }
  return {{"type", "points"}, {"points", std::move(points)}};
}

}  // namespace

ResolvedProblem resolve_problem(const ExperimentConfig& cfg) {
  ResolvedProblem prob;
  prob.dim_space = cfg.dim;
  prob.n_times = cfg.n_times;
  const int mollifier_dim = cfg.mode == ControlMode::kVelocity ? cfg.dim : 2 * cfg.dim;
  prob.delta = cfg.delta ? *cfg.delta
                         : delta_from_n(cfg.n_particles, mollifier_dim, *cfg.delta_rule_k);
  prob.alpha = cfg.alpha.resolve(cfg.epsilon);
  if (!(prob.alpha > 0.0)) throw ConfigError("config.optimizer.alpha", "resolved alpha must be positive");

  // Source and target draws share one seeded stream, sources first.
  Rng rng(cfg.optimizer.seed);
  prob.sources = materialize(cfg.source, cfg.n_particles, rng, "config.source");
  if (prob.sources.dim != cfg.dim) throw ConfigError("config.source", "source dimension disagrees with dim");

  prob.spec.mode = cfg.mode;
  prob.spec.epsilon = cfg.epsilon;
  prob.spec.mollifier = Mollifier(prob.delta, mollifier_dim);
  if (cfg.target.gaussian) {
    prob.spec.target = TargetMeasure::gaussian_iso(cfg.target.mean, cfg.target.stddev);
  } else {
    prob.spec.target =
        TargetMeasure::empirical(materialize(cfg.target.cloud, cfg.n_particles, rng, "config.target"));
  }
  if (prob.spec.target.dim() != mollifier_dim) {
    throw ConfigError("config.target", "target dimension must match the control mode's state dimension");
  }

  if (!cfg.obstacle_circles.empty()) {
    if (cfg.mode == ControlMode::kAcceleration) {
      throw ConfigError("config.obstacles", "obstacles are supported in velocity mode only");
    }
    prob.spec.obstacles.circles = cfg.obstacle_circles;
    for (const auto& circ : prob.spec.obstacles.circles) {
      if (static_cast<int>(circ.center.size()) != cfg.dim) {
        throw ConfigError("config.obstacles.circles[].center", "dimension disagrees with dim");
      }
    }
    const double h = 1.0 / (cfg.n_times - 1);
    // The 1/(h*eps) scale alone leaves the quadratic hinge softer than the kinetic
    // stiffness at the saddle where two circles overlap, so trajectories cross
    // there; a 10x stronger default makes that crossing unstable and descent
    // routes fully around the obstacles.
    prob.c_omega = cfg.obstacle_strength ? *cfg.obstacle_strength : 10.0 / (h * cfg.epsilon);
    prob.spec.obstacles.strength = prob.c_omega;
  }

  if (cfg.mode == ControlMode::kAcceleration) {
    prob.initial_velocities =
        cfg.initial_velocities ? *cfg.initial_velocities : PointCloud(cfg.n_particles, cfg.dim);
    if (prob.initial_velocities.n != cfg.n_particles || prob.initial_velocities.dim != cfg.dim) {
      throw ConfigError("config.initial_velocities", "shape disagrees with n_particles / dim");
    }
  }

  prob.optimizer = cfg.optimizer;
  prob.optimizer.learning_rate = prob.alpha;
  return prob;
}

json resolved_config_json(const ExperimentConfig& cfg, const ResolvedProblem& prob) {
  json out{
      {"experiment", cfg.experiment},
      {"mode", cfg.mode == ControlMode::kVelocity ? "velocity" : "acceleration"},
      {"n_particles", cfg.n_particles},
      {"n_times", cfg.n_times},
      {"dim", cfg.dim},
      {"epsilon", cfg.epsilon},
      {"delta", prob.delta},
      {"source", cloud_to_json(prob.sources)},
      {"optimizer",
       {{"alpha", prob.alpha},
        {"max_steps", prob.optimizer.max_steps},
        {"lr_reduce_factor", prob.optimizer.lr_reduce_factor},
        {"lr_reduce_patience", prob.optimizer.lr_reduce_patience},
        {"lr_floor", prob.optimizer.lr_floor},
        {"early_stop_patience", prob.optimizer.early_stop_patience},
        {"seed", prob.optimizer.seed}}},
      {"rng_algorithm", Rng::kAlgorithm},
  };
  if (cfg.target.gaussian) {
    out["target"] = {{"type", "gaussian"}, {"mean", cfg.target.mean}, {"std", cfg.target.stddev}};
  } else {
    out["target"] = cloud_to_json(prob.spec.target.points);
  }
  if (!prob.spec.obstacles.circles.empty()) {
    json circles = json::array();
    for (const auto& circ : prob.spec.obstacles.circles) {
      circles.push_back({{"center", circ.center}, {"radius", circ.radius}});
    }
    out["obstacles"] = {{"circles", std::move(circles)}, {"strength", prob.c_omega}};
  }
  if (cfg.mode == ControlMode::kAcceleration) {
    json iv = cloud_to_json(prob.initial_velocities);
    out["initial_velocities"] = {{"type", "points"}, {"points", iv["points"]}};
  }
  if (cfg.exact_map) out["exact_map"] = *cfg.exact_map;
  if (cfg.compare_assignment) out["compare_assignment"] = true;
  return out;
}

}  // namespace blobot
