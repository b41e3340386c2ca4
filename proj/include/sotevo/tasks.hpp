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

#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sotevo/kinematics.hpp"

namespace sotevo {

inline constexpr int kScanRays = 360;

enum class TaskKind {
  ik,
  obstacle_avoidance,
  max_manipulability,
  max_joint_limit_distance,
  distractor_base_circle,
  distractor_base_spin,
  distractor_ee_circle,
  distractor_joint_oscillation,
};

bool is_distractor(TaskKind kind);
std::string task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(const std::string& name);

/// How a distractor claims Jacobian rows for null-space protection.
enum class ClaimMode { full_block, partial_block, random };

std::string claim_mode_name(ClaimMode mode);
ClaimMode claim_mode_from_name(const std::string& name);

struct ParamSpec {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  double default_value = 0.5;
  bool min_exclusive = false;

  /// Clips v into the declared bound (a hair above min when exclusive).
  double clip(double v) const;
  bool contains(double v) const;
};

struct TaskSpec {
  std::string id;
  TaskKind kind = TaskKind::ik;
  std::vector<ParamSpec> params;
  ClaimMode claim_mode = ClaimMode::full_block;  // distractors only

  Eigen::VectorXd default_params() const;
  int param_index(const std::string& name) const;  // -1 when absent
};

/// The dictionary D of tasks the robot may execute. Genomes are
/// permutations of this list with per-entry parameters and flags.
struct TaskDictionary {
  std::vector<TaskSpec> tasks;

  int size() const { return static_cast<int>(tasks.size()); }
  int index_of(const std::string& id) const;  // -1 when absent
  const TaskSpec& at(const std::string& id) const;
  void validate() const;
};

/// Default parameter sets per task kind; bounds follow the stability
/// ranges used throughout (gamma_cl in (0, 2], gamma_ol in (0, 60]).
std::vector<ParamSpec> default_param_specs(TaskKind kind);

/// Quintic (minimum-jerk) point-to-point plan per coordinate: zero velocity
/// and acceleration at both ends, held at the goal afterwards. Angular
/// coordinates travel the shortest wrapped arc.
class TrajectoryPlan {
 public:
  TrajectoryPlan() = default;
  TrajectoryPlan(Eigen::VectorXd start, Eigen::VectorXd goal, double t0,
                 double duration, std::vector<bool> angular = {});

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd velocity(double t) const;
  double t0() const { return t0_; }
  double duration() const { return duration_; }

 private:
  Eigen::VectorXd start_, delta_;
  double t0_ = 0.0, duration_ = 1.0;
  std::vector<bool> angular_;
};

TrajectoryPlan plan_trajectory(const Eigen::VectorXd& start,
                               const Eigen::VectorXd& goal, double t0,
                               double duration,
                               std::vector<bool> angular = {});

/// Pose-space plan helper (x, y, phi with wrapped phi).
TrajectoryPlan plan_pose_trajectory(const Pose2D& start, const Pose2D& goal,
                                    double t0, double duration);

/// Ray distances (360, meters from the chassis edge) for a base pose at the
/// episode's current instant. Supplied by the simulator.
using ScanFn = std::function<Eigen::VectorXd(const Pose2D&)>;

struct TaskDiagnostics {
  double err_norm = std::numeric_limits<double>::quiet_NaN();
  double w = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
};

struct TaskOutput {
  Eigen::VectorXd qdot_d;   // length n
  Eigen::MatrixXd j_claim;  // k x n, k >= 0; empty means "claims nothing"
  TaskDiagnostics diag;
};

/// Per-ray repulsion plan: pseudo-energy at activation decays to zero over
/// the task's trajectory time.
struct OaRayPlan {
  bool active = false;
  double eps0 = 0.0;
  double t0 = 0.0;
};

/// Mutable per-episode task state. Each stack entry owns one.
struct TaskState {
  std::optional<TrajectoryPlan> ik_plan;
  std::vector<OaRayPlan> rays;
  Pose2D initial_base_pose;
  Pose2D initial_ee_pose;
  Eigen::VectorXd initial_q;
  std::mt19937_64 rng;  // random-claim distractors
};

/// Builds the state for one stack entry at episode start. `goal` is the
/// mission goal pose used to lay out the IK trajectory.
TaskState init_task_state(const TaskSpec& spec, const RobotModel& model,
                          const Eigen::VectorXd& q0, const Pose2D& goal,
                          const Eigen::VectorXd& params, std::uint64_t seed);

// Individual task laws. All return a desired joint velocity plus the
// Jacobian rows the task protects through null-space projection.

TaskOutput ik_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                        const TrajectoryPlan& plan, double t,
                        const Eigen::VectorXd& params, const TaskSpec& spec,
                        double lambda);

TaskOutput oa_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& scan, double t,
                        const Eigen::VectorXd& params, const TaskSpec& spec,
                        TaskState& state, const ScanFn& scan_fn,
                        double lambda);

TaskOutput manip_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& params,
                           const TaskSpec& spec);

TaskOutput mjl_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& params, const TaskSpec& spec);

TaskOutput distractor_step(const RobotModel& model, const Eigen::VectorXd& q,
                           double t, const Eigen::VectorXd& params,
                           const TaskSpec& spec, TaskState& state,
                           double lambda);

/// Dispatch on spec.kind. `scan`/`scan_fn` may be empty for tasks that do
/// not sense. Throws ConfigError on a kind/model mismatch.
TaskOutput evaluate_task(const TaskSpec& spec, const RobotModel& model,
                         const Eigen::VectorXd& q, double t,
                         const Eigen::VectorXd& params, TaskState& state,
                         const Eigen::VectorXd* scan, const ScanFn* scan_fn,
                         double lambda);

}  // namespace sotevo
