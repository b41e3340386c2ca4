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

#include "sotevo/stack.hpp"

#include <json.hpp>
#include <map>

#include "sotevo/errors.hpp"

namespace sotevo {

using nlohmann::json;

std::vector<int> StackOfTasks::active_indices() const {
  std::vector<int> idx;
  for (int i = 0; i < size(); ++i) {
    if (entries[static_cast<size_t>(i)].active) idx.push_back(i);
  }
  return idx;
}

std::vector<std::string> StackOfTasks::active_order() const {
  std::vector<std::string> ids;
  for (const TaskEntry& e : entries) {
    if (e.active) ids.push_back(e.task_id);
  }
  return ids;
}

StackOfTasks default_stack(const TaskDictionary& dict) {
  StackOfTasks s;
  for (const TaskSpec& t : dict.tasks) {
    s.entries.push_back({t.id, t.default_params(), true});
  }
  return s;
}

void validate_stack(const StackOfTasks& stack, const TaskDictionary& dict) {
  if (stack.size() != dict.size()) {
    throw ConfigError("stack has " + std::to_string(stack.size()) +
                      " entries, dictionary has " + std::to_string(dict.size()));
  }
  std::vector<bool> seen(static_cast<size_t>(dict.size()), false);
  bool any_active = false;
  for (const TaskEntry& e : stack.entries) {
    const int di = dict.index_of(e.task_id);
    if (di < 0) throw ConfigError("stack entry '" + e.task_id + "' not in dictionary");
    if (seen[static_cast<size_t>(di)]) {
      throw ConfigError("stack entry '" + e.task_id + "' duplicated");
    }
    seen[static_cast<size_t>(di)] = true;
    const TaskSpec& spec = dict.tasks[static_cast<size_t>(di)];
    if (e.params.size() != static_cast<Eigen::Index>(spec.params.size())) {
      throw ConfigError("stack entry '" + e.task_id + "': wrong parameter count");
    }
    for (size_t p = 0; p < spec.params.size(); ++p) {
      if (!spec.params[p].contains(e.params[static_cast<Eigen::Index>(p)])) {
        throw ConfigError("stack entry '" + e.task_id + "': parameter '" +
                          spec.params[p].name + "' out of bounds");
      }
    }
    any_active = any_active || e.active;
  }
  if (!any_active) throw ConfigError("stack has no active entries");
  if (stack.cost && !(*stack.cost >= 0.0)) {
    throw ConfigError("stack cost must be >= 0 when set");
  }
}

Eigen::MatrixXd null_space_projector(const Eigen::MatrixXd& j_aug, int n,
                                     double lambda) {
  if (j_aug.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  if (j_aug.cols() != n) {
    throw CompositionError("projector: claim has " +
                           std::to_string(j_aug.cols()) + " columns, expected " +
                           std::to_string(n));
  }
  return Eigen::MatrixXd::Identity(n, n) -
         damped_pseudo_inverse(j_aug, lambda) * j_aug;
}

Eigen::VectorXd compose(const std::vector<TaskOutput>& outputs, int n,
                        double lambda) {
  Eigen::VectorXd qdot = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd j_aug(0, n);
  for (const TaskOutput& out : outputs) {
    if (out.qdot_d.size() != n) {
      throw CompositionError("compose: output velocity has " +
                             std::to_string(out.qdot_d.size()) +
                             " entries, expected " + std::to_string(n));
    }
    if (out.j_claim.rows() > 0 && out.j_claim.cols() != n) {
      throw CompositionError("compose: claim has " +
                             std::to_string(out.j_claim.cols()) +
                             " columns, expected " + std::to_string(n));
    }
    qdot += null_space_projector(j_aug, n, lambda) * out.qdot_d;
    if (out.j_claim.rows() > 0) {
      Eigen::MatrixXd grown(j_aug.rows() + out.j_claim.rows(), n);
      grown << j_aug, out.j_claim;
      j_aug = std::move(grown);
    }
  }
  return qdot;
}

double sot_distance(const StackOfTasks& a, const StackOfTasks& b) {
  if (a.size() != b.size()) {
    throw ComparisonError("stacks have different sizes");
  }
  const int n_tasks = a.size();

  std::map<std::string, int> rank_a, rank_b;  // active ranks
  {
    int r = 0;
    for (const TaskEntry& e : a.entries) {
      if (e.active) rank_a[e.task_id] = r++;
    }
    r = 0;
    for (const TaskEntry& e : b.entries) {
      if (e.active) rank_b[e.task_id] = r++;
    }
  }

  double d = 0.0;
  for (const TaskEntry& ea : a.entries) {
    const TaskEntry* eb = nullptr;
    for (const TaskEntry& cand : b.entries) {
      if (cand.task_id == ea.task_id) {
        eb = &cand;
        break;
      }
    }
    if (eb == nullptr) {
      throw ComparisonError("task '" + ea.task_id + "' missing from one stack");
    }
    if (ea.params.size() != eb->params.size()) {
      throw ComparisonError("task '" + ea.task_id +
                            "': parameter vectors differ in size");
    }
    d += (ea.params - eb->params).norm();
    if (ea.active && eb->active) {
      d += std::abs(rank_a.at(ea.task_id) - rank_b.at(ea.task_id));
    } else {
      d += n_tasks;
    }
  }
  return d;
}

std::string serialize_stack(const StackOfTasks& stack,
                            const TaskDictionary& dict) {
  json doc;
  doc["cost"] = stack.cost ? json(*stack.cost) : json(nullptr);
  doc["entries"] = json::array();
  for (const TaskEntry& e : stack.entries) {
    const TaskSpec& spec = dict.at(e.task_id);
    if (e.params.size() != static_cast<Eigen::Index>(spec.params.size())) {
      throw ConfigError("serialize: entry '" + e.task_id +
                        "' parameter count mismatch");
    }
    json je;
    je["task_id"] = e.task_id;
    je["active"] = e.active;
    je["params"] = json::object();
    for (size_t p = 0; p < spec.params.size(); ++p) {
      je["params"][spec.params[p].name] = e.params[static_cast<Eigen::Index>(p)];
    }
    doc["entries"].push_back(je);
  }
  return doc.dump(2) + "\n";
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("stack document: ") + err.what());
  }
}

}  // namespace

StackOfTasks deserialize_stack(const std::string& text,
                               const TaskDictionary& dict) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array()) {
    throw ParseError("stack document: missing 'entries' array");
  }
  StackOfTasks stack;
  if (doc.contains("cost") && !doc["cost"].is_null()) {
    stack.cost = doc["cost"].get<double>();
  }
  for (const json& je : doc["entries"]) {
    if (!je.contains("task_id") || !je.contains("active") ||
        !je.contains("params") || !je["params"].is_object()) {
      throw ParseError("stack document: malformed entry");
    }
    TaskEntry e;
    e.task_id = je["task_id"].get<std::string>();
    e.active = je["active"].get<bool>();
    const TaskSpec& spec = dict.at(e.task_id);
    e.params.resize(static_cast<Eigen::Index>(spec.params.size()));
    for (size_t p = 0; p < spec.params.size(); ++p) {
      const std::string& name = spec.params[p].name;
      if (!je["params"].contains(name)) {
        throw ParseError("stack document: entry '" + e.task_id +
                         "' missing parameter '" + name + "'");
      }
      e.params[static_cast<Eigen::Index>(p)] = je["params"][name].get<double>();
    }
    stack.entries.push_back(std::move(e));
  }
  return stack;
}

TaskDictionary dictionary_from_stack_json(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array()) {
    throw ParseError("stack document: missing 'entries' array");
  }
  TaskDictionary dict;
  for (const json& je : doc["entries"]) {
    if (!je.contains("task_id") || !je.contains("params") ||
        !je["params"].is_object()) {
      throw ParseError("stack document: malformed entry");
    }
    TaskSpec spec;
    spec.id = je["task_id"].get<std::string>();
    for (auto it = je["params"].begin(); it != je["params"].end(); ++it) {
      spec.params.push_back({it.key(),
                             -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(), 0.0,
                             false});
    }
    dict.tasks.push_back(std::move(spec));
  }
  return dict;
}

}  // namespace sotevo
