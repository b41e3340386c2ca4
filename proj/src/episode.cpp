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

#include "sotevo/episode.hpp"

#include <limits>

#include "sotevo/errors.hpp"
#include "sotevo/seed.hpp"

namespace sotevo {

EpisodeResult run_episode(const StackOfTasks& stack, const World& world,
                          const RobotModel& model, const TaskDictionary& dict,
                          const CostSpec& cost_spec, const EpisodeConfig& cfg,
                          std::uint64_t seed) {
  model.validate();
  world.validate(model);
  cfg.validate(model);
  validate_stack(stack, dict);

  const int n = model.dof();
  const std::vector<int> active = stack.active_indices();

  Eigen::VectorXd q = randomize_initial(cfg, model, world, derive_seed(seed, {0}));

  // Per-entry task state; distractor claim streams get their own seeds.
  std::vector<const TaskSpec*> specs;
  std::vector<TaskState> states;
  bool has_active_ik = false;
  for (int idx : active) {
    const TaskEntry& e = stack.entries[static_cast<size_t>(idx)];
    const TaskSpec& spec = dict.at(e.task_id);
    specs.push_back(&spec);
    states.push_back(init_task_state(
        spec, model, q, world.goal, e.params,
        derive_seed(seed, {1, static_cast<std::uint64_t>(idx)})));
    if (spec.kind == TaskKind::ik) has_active_ik = true;
  }

  EpisodeResult result;
  EpisodeTrace& trace = result.trace;
  trace.dt = cfg.dt;
  trace.record_threshold = cost_spec.record_threshold();

  const int max_steps = static_cast<int>(std::ceil(cfg.max_time / cfg.dt));
  double prev_err = std::numeric_limits<double>::infinity();

  for (int step = 0;; ++step) {
    const double t = step * cfg.dt;
    const Pose2D base = model.base_enabled ? Pose2D{q[0], q[1], q[2]} : Pose2D{};
    const Pose2D pose = forward_kinematics(model, q);
    const SensorScan s = scan(world, model, base, t);
    ScanFn scan_fn = [&](const Pose2D& p) {
      return scan(world, model, p, t).distances;
    };

    std::vector<TaskOutput> outputs;
    outputs.reserve(active.size());
    for (size_t k = 0; k < active.size(); ++k) {
      const TaskEntry& e = stack.entries[static_cast<size_t>(active[k])];
      outputs.push_back(evaluate_task(*specs[k], model, q, t, e.params,
                                      states[k], &s.distances, &scan_fn,
                                      cfg.damping_lambda));
    }
    Eigen::VectorXd qdot = active.empty()
                               ? Eigen::VectorXd::Zero(n)
                               : compose(outputs, n, cfg.damping_lambda);
    qdot = clamp_velocities(qdot, q, model, cfg);

    TraceRow row;
    row.t = t;
    row.q = q;
    row.pose = pose;
    row.err_vec = pose_error(world.goal, pose);
    row.err_norm = row.err_vec.norm();
    row.min_ray = s.distances.minCoeff();
    if (trace.record_threshold > 0.0) {
      for (int i = 0; i < kScanRays; ++i) {
        if (s.distances[i] < trace.record_threshold) {
          row.violations.push_back(s.distances[i]);
        }
      }
    }
    row.w = arm_manipulability(model, q);
    row.w_mjl = joint_limit_measure(model, q);
    row.qdot = qdot;
    trace.rows.push_back(std::move(row));

    const TraceRow& rec = trace.rows.back();
    const double clearance = min_obstacle_clearance(world, model, base, t);
    if (std::min(clearance, rec.min_ray) <= cfg.collision_distance) {
      trace.termination = TerminationReason::collision;
      trace.termination_time = t;
      break;
    }
    if (has_active_ik && model.arm_dof() >= 2 &&
        rec.w < cfg.singularity_w_floor) {
      trace.termination = TerminationReason::singularity;
      trace.termination_time = t;
      break;
    }
    // Goal must hold for one full step to avoid fly-through triggering.
    if (rec.err_norm <= cfg.goal_tolerance && prev_err <= cfg.goal_tolerance) {
      trace.termination = TerminationReason::goal_reached;
      trace.termination_time = t;
      break;
    }
    if (step >= max_steps) {
      trace.termination = TerminationReason::timeout;
      trace.termination_time = t;
      break;
    }
    prev_err = rec.err_norm;

    q += cfg.dt * qdot;
    if (model.base_enabled) {
      q[0] = std::clamp(q[0], model.workspace.x_min, model.workspace.x_max);
      q[1] = std::clamp(q[1], model.workspace.y_min, model.workspace.y_max);
      q[2] = wrap_angle(q[2]);
    }
  }

  result.cost = combine(cost_spec, trace);
  return result;
}

}  // namespace sotevo
