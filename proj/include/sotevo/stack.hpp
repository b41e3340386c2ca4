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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sotevo/tasks.hpp"

namespace sotevo {

/// One genome slot: a dictionary task with parameters and an activation
/// flag. Inactive entries are introns: carried, never executed.
struct TaskEntry {
  std::string task_id;
  Eigen::VectorXd params;
  bool active = true;
};

/// The genome: every dictionary task exactly once, ordered by priority
/// (index 0 = highest), with the episodic cost attached after evaluation.
struct StackOfTasks {
  std::optional<double> cost;
  std::vector<TaskEntry> entries;
  /// Generation whose episode seeds produced `cost`; in-memory metadata
  /// only (never serialized), lets a replay reproduce the recorded cost.
  int eval_generation = -1;

  int size() const { return static_cast<int>(entries.size()); }
  std::vector<int> active_indices() const;
  /// Active task ids in priority order (the phenotype order).
  std::vector<std::string> active_order() const;
};

/// Fully-active stack with dictionary order and default parameters.
StackOfTasks default_stack(const TaskDictionary& dict);

/// Checks the genome invariants: permutation of the dictionary, parameter
/// bounds, at least one active entry. Throws ConfigError.
void validate_stack(const StackOfTasks& stack, const TaskDictionary& dict);

/// N = I - J_aug^+ J_aug. Empty row set gives the identity.
Eigen::MatrixXd null_space_projector(const Eigen::MatrixXd& j_aug, int n,
                                     double lambda);

/// Combines the active entries' outputs by recursive null-space projection:
/// qdot = sum_i N_{i-1} qdot_i with N built from the stacked claims of all
/// higher-priority entries. `outputs` follow the stack's active order.
Eigen::VectorXd compose(const std::vector<TaskOutput>& outputs, int n,
                        double lambda);

/// Dissimilarity of two stacks over the same dictionary: per task, the
/// parameter-vector distance plus the active-rank difference (or the task
/// count when the task is not active in both).
double sot_distance(const StackOfTasks& a, const StackOfTasks& b);

/// JSON round-trip. Parameter names come from the dictionary; values keep
/// full precision. The document schema is
/// {"cost": number|null, "entries": [{"task_id", "active", "params"}]}.
std::string serialize_stack(const StackOfTasks& stack,
                            const TaskDictionary& dict);
StackOfTasks deserialize_stack(const std::string& text,
                               const TaskDictionary& dict);

/// Reconstructs a parameter-name dictionary from a serialized stack, for
/// tools that inspect or compare stacks without a run configuration.
TaskDictionary dictionary_from_stack_json(const std::string& text);

}  // namespace sotevo
