// Copyright 2026 The sotevo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sotevo/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sotevo/errors.hpp"

namespace sotevo {

using nlohmann::json;

namespace {

// Thin cursor over a json node carrying its path for diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *j_; }

  bool has(const std::string& key) const {
    return j_->is_object() && j_->contains(key);
  }

  Node child(const std::string& key) const {
    if (!j_->is_object() || !j_->contains(key)) {
      throw ConfigError(path_ + ": missing required field '" + key + "'");
    }
    return Node((*j_)[key], path_.empty() ? key : path_ + "." + key);
  }

  Node item(size_t i) const {
    return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  size_t length() const {
    if (!j_->is_array()) throw ConfigError(path_ + ": expected an array");
    return j_->size();
  }

  double num() const {
    if (!j_->is_number()) throw ConfigError(path_ + ": expected a number");
    return j_->get<double>();
  }

  long long integer() const {
    if (!j_->is_number_integer()) {
      throw ConfigError(path_ + ": expected an integer");
    }
    return j_->get<long long>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) throw ConfigError(path_ + ": expected a boolean");
    return j_->get<bool>();
  }

  std::string str() const {
    if (!j_->is_string()) throw ConfigError(path_ + ": expected a string");
    return j_->get<std::string>();
  }

  double num_or(const std::string& key, double fallback) const {
    return has(key) ? child(key).num() : fallback;
  }
  long long int_or(const std::string& key, long long fallback) const {
    return has(key) ? child(key).integer() : fallback;
  }
  bool bool_or(const std::string& key, bool fallback) const {
    return has(key) ? child(key).boolean() : fallback;
  }
  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? child(key).str() : fallback;
  }

 private:
  const json* j_;
  std::string path_;
};

RobotModel parse_robot(const Node& node) {
  RobotModel m;
  m.base_enabled = node.bool_or("base_enabled", true);
  m.base_radius = node.num_or("base_radius", 0.15);
  if (node.has("arm_link_lengths")) {
    const Node links = node.child("arm_link_lengths");
    for (size_t i = 0; i < links.length(); ++i) {
      m.arm_link_lengths.push_back(links.item(i).num());
    }
  }
  if (node.has("arm_joint_limits")) {
    const Node lims = node.child("arm_joint_limits");
    for (size_t i = 0; i < lims.length(); ++i) {
      const Node pair = lims.item(i);
      if (pair.length() != 2) {
        throw ConfigError(pair.path() + ": expected [min, max]");
      }
      m.arm_joint_limits.push_back({pair.item(0).num(), pair.item(1).num()});
    }
  }
  if (node.has("workspace")) {
    const Node w = node.child("workspace");
    m.workspace = {w.child("x_min").num(), w.child("x_max").num(),
                   w.child("y_min").num(), w.child("y_max").num()};
  }
  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  return m;
}

Pose2D parse_pose(const Node& node) {
  return {node.child("x").num(), node.child("y").num(),
          node.num_or("phi", 0.0)};
}

World parse_world(const Node& node, const RobotModel& model) {
  World w;
  w.goal = parse_pose(node.child("goal"));
  w.max_range = node.num_or("max_range", 5.0);
  if (node.has("static_circles")) {
    const Node arr = node.child("static_circles");
    for (size_t i = 0; i < arr.length(); ++i) {
      const Node c = arr.item(i);
      w.circles.push_back(
          {c.child("x").num(), c.child("y").num(), c.child("radius").num()});
    }
  }
  if (node.has("static_segments")) {
    const Node arr = node.child("static_segments");
    for (size_t i = 0; i < arr.length(); ++i) {
      const Node s = arr.item(i);
      w.segments.push_back({s.child("x1").num(), s.child("y1").num(),
                            s.child("x2").num(), s.child("y2").num()});
    }
  }
  if (node.has("dynamic_obstacles")) {
    const Node arr = node.child("dynamic_obstacles");
    for (size_t i = 0; i < arr.length(); ++i) {
      const Node o = arr.item(i);
      DynamicObstacle mover;
      mover.radius = o.child("radius").num();
      mover.speed = o.child("speed").num();
      const Node wp = o.child("waypoints");
      for (size_t k = 0; k < wp.length(); ++k) {
        const Node p = wp.item(k);
        mover.waypoints.emplace_back(p.child("x").num(), p.child("y").num());
      }
      w.movers.push_back(std::move(mover));
    }
  }
  try {
    w.validate(model);
  } catch (const ConfigError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  return w;
}

TaskDictionary parse_tasks(const Node& node) {
  TaskDictionary dict;
  for (size_t i = 0; i < node.length(); ++i) {
    const Node t = node.item(i);
    TaskSpec spec;
    spec.id = t.child("id").str();
    spec.kind = [&] {
      try {
        return task_kind_from_name(t.child("kind").str());
      } catch (const ConfigError& e) {
        throw ConfigError(t.path() + ": " + e.what());
      }
    }();
    spec.params = default_param_specs(spec.kind);
    if (is_distractor(spec.kind)) {
      const std::string mode = t.str_or("j_mode", "full_block");
      try {
        spec.claim_mode = claim_mode_from_name(mode);
      } catch (const ConfigError& e) {
        throw ConfigError(t.path() + ": " + e.what());
      }
    }
    if (t.has("params")) {
      const Node params = t.child("params");
      for (auto it = params.raw().begin(); it != params.raw().end(); ++it) {
        const int idx = spec.param_index(it.key());
        if (idx < 0) {
          throw ConfigError(params.path() + ": task kind '" +
                            task_kind_name(spec.kind) +
                            "' has no parameter '" + it.key() + "'");
        }
        const Node p = params.child(it.key());
        ParamSpec& ps = spec.params[static_cast<size_t>(idx)];
        ps.min = p.num_or("min", ps.min);
        ps.max = p.num_or("max", ps.max);
        ps.default_value = p.num_or("default", ps.default_value);
      }
    }
    dict.tasks.push_back(std::move(spec));
  }
  try {
    dict.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  return dict;
}

CostSpec parse_cost(const Node& node) {
  CostSpec spec;
  const Node terms = node.child("terms");
  double sum = 0.0;
  for (size_t i = 0; i < terms.length(); ++i) {
    const Node t = terms.item(i);
    CostTerm term;
    try {
      term.op = cost_op_from_name(t.child("op").str());
    } catch (const ConfigError& e) {
      throw ConfigError(t.path() + ": " + e.what());
    }
    term.weight = t.child("weight").num();
    term.scale = t.num_or("scale", 1.0);
    term.rest_length = t.num_or("rest_length", 0.5);
    sum += term.weight;
    spec.terms.push_back(term);
  }
  if (node.bool_or("normalize_weights", false)) {
    if (sum <= 0.0) {
      throw ConfigError(node.path() + ".terms: weights sum to zero");
    }
    for (CostTerm& t : spec.terms) t.weight /= sum;
  }
  spec.collision_penalty = node.num_or("collision_penalty", 1e3);
  spec.goal_tolerance = node.num_or("goal_tolerance", 0.05);
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  return spec;
}

GpConfig parse_gp(const Node& node, const TaskDictionary& dict) {
  GpConfig gp;
  gp.population_size = static_cast<int>(node.int_or("population_size", 8));
  gp.max_generations = static_cast<int>(node.int_or("max_generations", 20));
  gp.crossover_prob = node.num_or("crossover_prob", 0.5);
  if (node.has("mutation_weights")) {
    const Node w = node.child("mutation_weights");
    gp.mutation_weights.swap_order = w.num_or("swap_order", 1.0);
    gp.mutation_weights.perturb_param = w.num_or("perturb_param", 1.0);
    gp.mutation_weights.flip_active = w.num_or("flip_active", 1.0);
  }
  gp.param_sigma = node.num_or("param_sigma", 0.1);
  gp.convergence_threshold =
      node.num_or("convergence_threshold", 0.5 * dict.size());
  gp.episodes_per_individual =
      static_cast<int>(node.int_or("episodes_per_individual", 2));
  try {
    gp.phase = phase_from_name(node.str_or("phase", "order"));
  } catch (const ConfigError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  gp.master_seed = static_cast<std::uint64_t>(node.int_or("master_seed", 1));
  gp.workers = static_cast<int>(node.int_or("workers", 1));
  if (node.has("benchmark_order")) {
    const Node order = node.child("benchmark_order");
    for (size_t i = 0; i < order.length(); ++i) {
      gp.benchmark_order.push_back(order.item(i).str());
    }
  }
  try {
    gp.validate(dict);
  } catch (const ConfigError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  return gp;
}

EpisodeConfig parse_episode(const Node& node, const RobotModel& model,
                            double goal_tolerance) {
  EpisodeConfig cfg;
  cfg.dt = node.num_or("dt", 0.01);
  cfg.max_time = node.num_or("max_time", 20.0);
  cfg.goal_tolerance = goal_tolerance;
  cfg.collision_distance = node.num_or("collision_distance", 0.05);
  cfg.epsilon_limit = node.num_or("epsilon_limit", 5.0);
  if (node.has("velocity_caps")) {
    const Node caps = node.child("velocity_caps");
    cfg.cap_base_linear = caps.num_or("base_linear", 1.0);
    cfg.cap_base_angular = caps.num_or("base_angular", 2.0);
    cfg.cap_arm = caps.num_or("arm", 2.0);
  }
  cfg.damping_lambda = node.num_or("damping_lambda", 1e-3);
  cfg.singularity_w_floor = node.num_or("singularity_w_floor", 1e-6);
  const Node init = node.child("init");
  const Node nominal = init.child("nominal_q");
  cfg.init.nominal_q.resize(static_cast<Eigen::Index>(nominal.length()));
  for (size_t i = 0; i < nominal.length(); ++i) {
    cfg.init.nominal_q[static_cast<Eigen::Index>(i)] = nominal.item(i).num();
  }
  cfg.init.base_xy_range = init.num_or("base_xy_range", 0.0);
  cfg.init.base_theta_range = init.num_or("base_theta_range", 0.0);
  cfg.init.arm_range = init.num_or("arm_range", 0.0);
  cfg.init.clearance_margin = init.num_or("clearance_margin", 0.05);
  try {
    cfg.validate(model);
  } catch (const ConfigError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("config: ") + err.what());
  }
  const Node root(doc, "");
  RunConfig cfg;
  cfg.scenario.model = parse_robot(root.child("robot"));
  cfg.scenario.world = parse_world(root.child("world"), cfg.scenario.model);
  cfg.scenario.dict = parse_tasks(root.child("tasks"));
  cfg.scenario.cost = parse_cost(root.child("cost"));
  cfg.scenario.episode = parse_episode(root.child("episode"),
                                       cfg.scenario.model,
                                       cfg.scenario.cost.goal_tolerance);
  cfg.gp = parse_gp(root.child("gp"), cfg.scenario.dict);
  if (root.has("output")) {
    cfg.out_dir = root.child("output").str_or("dir", "out");
  }
  cfg.scenario.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path, std::string* raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (raw != nullptr) *raw = buf.str();
  return parse_run_config(buf.str());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sotevo
