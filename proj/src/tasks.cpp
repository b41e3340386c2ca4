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

#include "sotevo/tasks.hpp"

#include <algorithm>
#include <cmath>

#include "sotevo/errors.hpp"

namespace sotevo {

namespace {

// Fixed geometry of the distractor motions. Their only learnable parameter
// is the tracking gain; the shapes are part of the task definition.
constexpr double kBaseCircleRadius = 0.5;    // m
constexpr double kBaseCirclePeriod = 12.0;   // s
constexpr double kBaseSpinAmplitude = 0.8;   // rad
constexpr double kBaseSpinPeriod = 8.0;      // s
constexpr double kEeCircleRadius = 0.25;     // m
constexpr double kEeCirclePeriod = 10.0;     // s
constexpr double kJointOscPeriod = 6.0;      // s
constexpr double kJointOscFill = 0.9;        // fraction of half-range swept
constexpr int kRandomClaimRows = 3;
constexpr double kOaFdStep = 1e-5;
constexpr double kOaReplanFactor = 1.1;

double param(const Eigen::VectorXd& values, const TaskSpec& spec,
             const char* name) {
  const int idx = spec.param_index(name);
  if (idx < 0 || idx >= values.size()) {
    throw ConfigError("task '" + spec.id + "': missing parameter '" + name +
                      "'");
  }
  return values[idx];
}

void require_base(const TaskSpec& spec, const RobotModel& model) {
  if (!model.base_enabled) {
    throw ConfigError("task '" + spec.id + "' needs a mobile base");
  }
}

void require_arm(const TaskSpec& spec, const RobotModel& model) {
  if (model.arm_dof() == 0) {
    throw ConfigError("task '" + spec.id + "' needs an arm");
  }
}

}  // namespace

bool is_distractor(TaskKind kind) {
  switch (kind) {
    case TaskKind::distractor_base_circle:
    case TaskKind::distractor_base_spin:
    case TaskKind::distractor_ee_circle:
    case TaskKind::distractor_joint_oscillation:
      return true;
    default:
      return false;
  }
}

std::string task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::ik: return "ik";
    case TaskKind::obstacle_avoidance: return "obstacle_avoidance";
    case TaskKind::max_manipulability: return "max_manipulability";
    case TaskKind::max_joint_limit_distance: return "max_joint_limit_distance";
    case TaskKind::distractor_base_circle: return "distractor_base_circle";
    case TaskKind::distractor_base_spin: return "distractor_base_spin";
    case TaskKind::distractor_ee_circle: return "distractor_ee_circle";
    case TaskKind::distractor_joint_oscillation:
      return "distractor_joint_oscillation";
  }
  return "unknown";
}

TaskKind task_kind_from_name(const std::string& name) {
  for (TaskKind k :
       {TaskKind::ik, TaskKind::obstacle_avoidance, TaskKind::max_manipulability,
        TaskKind::max_joint_limit_distance, TaskKind::distractor_base_circle,
        TaskKind::distractor_base_spin, TaskKind::distractor_ee_circle,
        TaskKind::distractor_joint_oscillation}) {
    if (task_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown task kind '" + name + "'");
}

std::string claim_mode_name(ClaimMode mode) {
  switch (mode) {
    case ClaimMode::full_block: return "full_block";
    case ClaimMode::partial_block: return "partial_block";
    case ClaimMode::random: return "random";
  }
  return "unknown";
}

ClaimMode claim_mode_from_name(const std::string& name) {
  if (name == "full_block") return ClaimMode::full_block;
  if (name == "partial_block") return ClaimMode::partial_block;
  if (name == "random") return ClaimMode::random;
  throw ConfigError("unknown claim mode '" + name + "'");
}

double ParamSpec::clip(double v) const {
  double lo = min;
  if (min_exclusive) lo = min + 1e-9 * (max - min);
  return std::clamp(v, lo, max);
}

bool ParamSpec::contains(double v) const {
  if (min_exclusive ? !(v > min) : !(v >= min)) return false;
  return v <= max;
}

Eigen::VectorXd TaskSpec::default_params() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(params.size()));
  for (size_t i = 0; i < params.size(); ++i) out[i] = params[i].default_value;
  return out;
}

int TaskSpec::param_index(const std::string& name) const {
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int TaskDictionary::index_of(const std::string& id) const {
  for (int i = 0; i < size(); ++i) {
    if (tasks[static_cast<size_t>(i)].id == id) return i;
  }
  return -1;
}

const TaskSpec& TaskDictionary::at(const std::string& id) const {
  const int i = index_of(id);
  if (i < 0) throw ConfigError("task id '" + id + "' not in the dictionary");
  return tasks[static_cast<size_t>(i)];
}

void TaskDictionary::validate() const {
  if (tasks.empty()) throw ConfigError("task dictionary is empty");
  for (const TaskSpec& t : tasks) {
    if (t.id.empty()) throw ConfigError("task with empty id");
    for (const ParamSpec& p : t.params) {
      if (!(p.min < p.max)) {
        throw ConfigError("task '" + t.id + "' parameter '" + p.name +
                          "': bounds must satisfy min < max");
      }
      if (!p.contains(p.default_value)) {
        throw ConfigError("task '" + t.id + "' parameter '" + p.name +
                          "': default outside bounds");
      }
    }
  }
  for (size_t i = 0; i < tasks.size(); ++i) {
    for (size_t j = i + 1; j < tasks.size(); ++j) {
      if (tasks[i].id == tasks[j].id) {
        throw ConfigError("duplicate task id '" + tasks[i].id + "'");
      }
    }
  }
}

std::vector<ParamSpec> default_param_specs(TaskKind kind) {
  const ParamSpec gamma_cl{"gamma_cl", 0.0, 2.0, 1.0, true};
  const ParamSpec gamma_ol{"gamma_ol", 0.0, 60.0, 10.0, true};
  switch (kind) {
    case TaskKind::ik:
      return {gamma_cl, {"t_traj", 0.5, 10.0, 4.0, false}};
    case TaskKind::obstacle_avoidance:
      return {{"r_rest", 0.0, 1.0, 0.4, true},
              gamma_cl,
              {"t_traj", 0.2, 5.0, 1.5, false}};
    case TaskKind::max_manipulability:
    case TaskKind::max_joint_limit_distance:
      return {gamma_ol};
    case TaskKind::distractor_base_circle:
    case TaskKind::distractor_base_spin:
    case TaskKind::distractor_ee_circle:
    case TaskKind::distractor_joint_oscillation:
      return {gamma_cl};
  }
  return {};
}

TrajectoryPlan::TrajectoryPlan(Eigen::VectorXd start, Eigen::VectorXd goal,
                               double t0, double duration,
                               std::vector<bool> angular)
    : start_(std::move(start)), t0_(t0), duration_(duration),
      angular_(std::move(angular)) {
  if (!(duration_ > 0.0)) throw ConfigError("trajectory duration must be > 0");
  if (goal.size() != start_.size()) {
    throw ConfigError("trajectory start/goal dimension mismatch");
  }
  delta_ = goal - start_;
  for (size_t i = 0; i < angular_.size() && i < static_cast<size_t>(delta_.size()); ++i) {
    if (angular_[i]) {
      delta_[static_cast<Eigen::Index>(i)] = angle_diff(
          goal[static_cast<Eigen::Index>(i)], start_[static_cast<Eigen::Index>(i)]);
    }
  }
}

Eigen::VectorXd TrajectoryPlan::value(double t) const {
  double tau = (t - t0_) / duration_;
  tau = std::clamp(tau, 0.0, 1.0);
  const double s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
  Eigen::VectorXd v = start_ + s * delta_;
  for (size_t i = 0; i < angular_.size() && i < static_cast<size_t>(v.size()); ++i) {
    if (angular_[i]) {
      v[static_cast<Eigen::Index>(i)] = wrap_angle(v[static_cast<Eigen::Index>(i)]);
    }
  }
  return v;
}

Eigen::VectorXd TrajectoryPlan::velocity(double t) const {
  const double tau = (t - t0_) / duration_;
  if (tau < 0.0 || tau > 1.0) return Eigen::VectorXd::Zero(start_.size());
  const double ds = 30.0 * tau * tau * (1.0 + tau * (-2.0 + tau)) / duration_;
  return ds * delta_;
}

TrajectoryPlan plan_trajectory(const Eigen::VectorXd& start,
                               const Eigen::VectorXd& goal, double t0,
                               double duration, std::vector<bool> angular) {
  return TrajectoryPlan(start, goal, t0, duration, std::move(angular));
}

TrajectoryPlan plan_pose_trajectory(const Pose2D& start, const Pose2D& goal,
                                    double t0, double duration) {
  Eigen::Vector3d s(start.x, start.y, start.phi);
  Eigen::Vector3d g(goal.x, goal.y, goal.phi);
  return TrajectoryPlan(s, g, t0, duration, {false, false, true});
}

TaskState init_task_state(const TaskSpec& spec, const RobotModel& model,
                          const Eigen::VectorXd& q0, const Pose2D& goal,
                          const Eigen::VectorXd& params, std::uint64_t seed) {
  TaskState st;
  st.initial_q = q0;
  st.initial_ee_pose = forward_kinematics(model, q0);
  st.initial_base_pose = model.base_enabled
                             ? Pose2D{q0[0], q0[1], wrap_angle(q0[2])}
                             : Pose2D{};
  st.rng.seed(seed);
  switch (spec.kind) {
    case TaskKind::ik:
      st.ik_plan = plan_pose_trajectory(st.initial_ee_pose, goal, 0.0,
                                        param(params, spec, "t_traj"));
      break;
    case TaskKind::obstacle_avoidance:
      st.rays.assign(kScanRays, OaRayPlan{});
      break;
    default:
      break;
  }
  return st;
}

TaskOutput ik_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                        const TrajectoryPlan& plan, double t,
                        const Eigen::VectorXd& params, const TaskSpec& spec,
                        double lambda) {
  const double gamma = param(params, spec, "gamma_cl");
  const Pose2D pose = forward_kinematics(model, q);
  const Eigen::Vector3d xd = plan.value(t);
  const Eigen::Vector3d xdot = plan.velocity(t);
  const Eigen::Vector3d e =
      pose_error({xd[0], xd[1], xd[2]}, pose);
  const Eigen::MatrixXd J = jacobian(model, q);
  TaskOutput out;
  out.qdot_d = damped_pseudo_inverse(J, lambda) * (xdot + gamma * e);
  out.j_claim = J;
  out.diag.err_norm = e.norm();
  return out;
}

TaskOutput oa_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& scan, double t,
                        const Eigen::VectorXd& params, const TaskSpec& spec,
                        TaskState& state, const ScanFn& scan_fn,
                        double lambda) {
  require_base(spec, model);
  if (scan.size() != kScanRays) {
    throw ConfigError("task '" + spec.id + "': scan must have " +
                      std::to_string(kScanRays) + " rays");
  }
  const double r_rest = param(params, spec, "r_rest");
  const double gamma = param(params, spec, "gamma_cl");
  const double t_traj = param(params, spec, "t_traj");
  const int n = model.dof();

  if (state.rays.size() != static_cast<size_t>(kScanRays)) {
    state.rays.assign(kScanRays, OaRayPlan{});
  }

  std::vector<int> active;
  for (int i = 0; i < kScanRays; ++i) {
    if (scan[i] < r_rest) {
      active.push_back(i);
    } else {
      state.rays[static_cast<size_t>(i)].active = false;
    }
  }

  TaskOutput out;
  out.qdot_d = Eigen::VectorXd::Zero(n);
  out.j_claim.resize(0, n);
  out.diag.sigma = 0.0;
  if (active.empty()) return out;

  // Central finite differences of every ray distance w.r.t. the base pose;
  // arm joints do not move the chassis-mounted sensor.
  const Pose2D base{q[0], q[1], q[2]};
  Eigen::MatrixXd ddist(kScanRays, 3);
  for (int b = 0; b < 3; ++b) {
    Pose2D plus = base, minus = base;
    (b == 0 ? plus.x : b == 1 ? plus.y : plus.phi) += kOaFdStep;
    (b == 0 ? minus.x : b == 1 ? minus.y : minus.phi) -= kOaFdStep;
    ddist.col(b) = (scan_fn(plus) - scan_fn(minus)) / (2.0 * kOaFdStep);
  }

  const int rows = static_cast<int>(active.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, n);
  Eigen::VectorXd desired(rows);
  for (int r = 0; r < rows; ++r) {
    const int ray = active[static_cast<size_t>(r)];
    const double d = scan[ray];
    const double eps = 0.5 * (r_rest - d) * (r_rest - d);
    out.diag.sigma += eps;

    OaRayPlan& plan = state.rays[static_cast<size_t>(ray)];
    if (!plan.active) {
      plan = {true, eps, t};
    }
    auto plan_eval = [&](double at) {
      double tau = std::clamp((at - plan.t0) / t_traj, 0.0, 1.0);
      const double s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
      const double inside = (at - plan.t0) >= 0.0 && (at - plan.t0) <= t_traj;
      const double ds =
          inside ? 30.0 * tau * tau * (1.0 + tau * (-2.0 + tau)) / t_traj : 0.0;
      return std::pair<double, double>{plan.eps0 * (1.0 - s), -plan.eps0 * ds};
    };
    auto [eps_d, epsdot_d] = plan_eval(t);
    if (eps > kOaReplanFactor * eps_d) {
      plan = {true, eps, t};
      std::tie(eps_d, epsdot_d) = plan_eval(t);
    }

    // d eps / d q = -(r_rest - d) * d d / d q on the base block.
    J.block(r, 0, 1, 3) = -(r_rest - d) * ddist.row(ray);
    desired[r] = epsdot_d + gamma * (eps_d - eps);
  }

  out.qdot_d = damped_pseudo_inverse(J, lambda) * desired;
  out.j_claim = J;
  return out;
}

TaskOutput manip_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& params,
                           const TaskSpec& spec) {
  const double gamma = param(params, spec, "gamma_ol");
  const ManipulabilityGradient g = manipulability_gradient(model, q);
  TaskOutput out;
  out.qdot_d = gamma * g.gradient;
  out.j_claim.resize(0, model.dof());
  out.diag.w = arm_manipulability(model, q);
  return out;
}

TaskOutput mjl_task_step(const RobotModel& model, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& params, const TaskSpec& spec) {
  const double gamma = param(params, spec, "gamma_ol");
  TaskOutput out;
  out.qdot_d = gamma * joint_limit_gradient(model, q);
  out.j_claim.resize(0, model.dof());
  out.diag.w = joint_limit_measure(model, q);
  return out;
}

namespace {

Eigen::MatrixXd distractor_claim(const TaskSpec& spec, const RobotModel& model,
                                 TaskState& state) {
  const int n = model.dof();
  switch (spec.claim_mode) {
    case ClaimMode::full_block:
      return Eigen::MatrixXd::Identity(n, n);
    case ClaimMode::partial_block: {
      const bool base_kind = spec.kind == TaskKind::distractor_base_circle ||
                             spec.kind == TaskKind::distractor_base_spin;
      const int rows = base_kind ? std::min(3, n) : (n + 1) / 2;
      return Eigen::MatrixXd::Identity(n, n).topRows(rows);
    }
    case ClaimMode::random: {
      std::normal_distribution<double> unit(0.0, 1.0);
      Eigen::MatrixXd J(kRandomClaimRows, n);
      for (int r = 0; r < kRandomClaimRows; ++r) {
        for (int c = 0; c < n; ++c) J(r, c) = unit(state.rng);
      }
      return J;
    }
  }
  return Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TaskOutput distractor_step(const RobotModel& model, const Eigen::VectorXd& q,
                           double t, const Eigen::VectorXd& params,
                           const TaskSpec& spec, TaskState& state,
                           double lambda) {
  const double gamma = param(params, spec, "gamma_cl");
  const int n = model.dof();
  TaskOutput out;
  out.qdot_d = Eigen::VectorXd::Zero(n);

  switch (spec.kind) {
    case TaskKind::distractor_base_circle: {
      require_base(spec, model);
      const double omega = 2.0 * M_PI / kBaseCirclePeriod;
      const Pose2D& p0 = state.initial_base_pose;
      // Starts on the circle at the initial base position.
      const double cx = p0.x - kBaseCircleRadius, cy = p0.y;
      const double px = cx + kBaseCircleRadius * std::cos(omega * t);
      const double py = cy + kBaseCircleRadius * std::sin(omega * t);
      out.qdot_d[0] =
          -kBaseCircleRadius * omega * std::sin(omega * t) + gamma * (px - q[0]);
      out.qdot_d[1] =
          kBaseCircleRadius * omega * std::cos(omega * t) + gamma * (py - q[1]);
      out.qdot_d[2] = gamma * angle_diff(p0.phi, q[2]);
      break;
    }
    case TaskKind::distractor_base_spin: {
      require_base(spec, model);
      const double omega = 2.0 * M_PI / kBaseSpinPeriod;
      const double theta_d =
          state.initial_base_pose.phi + kBaseSpinAmplitude * std::sin(omega * t);
      out.qdot_d[2] = kBaseSpinAmplitude * omega * std::cos(omega * t) +
                      gamma * angle_diff(theta_d, q[2]);
      break;
    }
    case TaskKind::distractor_ee_circle: {
      require_arm(spec, model);
      const double omega = 2.0 * M_PI / kEeCirclePeriod;
      const Pose2D ee = forward_kinematics(model, q);
      const Pose2D& e0 = state.initial_ee_pose;
      const double cx = e0.x - kEeCircleRadius, cy = e0.y;
      const Eigen::Vector2d pd(cx + kEeCircleRadius * std::cos(omega * t),
                               cy + kEeCircleRadius * std::sin(omega * t));
      const Eigen::Vector2d vd(-kEeCircleRadius * omega * std::sin(omega * t),
                               kEeCircleRadius * omega * std::cos(omega * t));
      const Eigen::MatrixXd Jp = jacobian(model, q).topRows(2);
      out.qdot_d = damped_pseudo_inverse(Jp, lambda) *
                   (vd + gamma * (pd - Eigen::Vector2d(ee.x, ee.y)));
      break;
    }
    case TaskKind::distractor_joint_oscillation: {
      require_arm(spec, model);
      const double omega = 2.0 * M_PI / kJointOscPeriod;
      const int nb = model.base_dof();
      for (int i = 0; i < model.arm_dof(); ++i) {
        const JointLimit& lim = model.arm_joint_limits[static_cast<size_t>(i)];
        const double amp = kJointOscFill * 0.5 * lim.range();
        const double qd = lim.mid() + amp * std::sin(omega * t);
        out.qdot_d[nb + i] =
            amp * omega * std::cos(omega * t) + gamma * (qd - q[nb + i]);
      }
      break;
    }
    default:
      throw ConfigError("task '" + spec.id + "' is not a distractor");
  }
  out.j_claim = distractor_claim(spec, model, state);
  return out;
}

TaskOutput evaluate_task(const TaskSpec& spec, const RobotModel& model,
                         const Eigen::VectorXd& q, double t,
                         const Eigen::VectorXd& params, TaskState& state,
                         const Eigen::VectorXd* scan, const ScanFn* scan_fn,
                         double lambda) {
  switch (spec.kind) {
    case TaskKind::ik:
      if (!state.ik_plan) {
        throw ConfigError("task '" + spec.id + "': state has no plan");
      }
      return ik_task_step(model, q, *state.ik_plan, t, params, spec, lambda);
    case TaskKind::obstacle_avoidance:
      if (scan == nullptr || scan_fn == nullptr) {
        throw ConfigError("task '" + spec.id + "': no sensor data supplied");
      }
      return oa_task_step(model, q, *scan, t, params, spec, state, *scan_fn,
                          lambda);
    case TaskKind::max_manipulability:
      return manip_task_step(model, q, params, spec);
    case TaskKind::max_joint_limit_distance:
      return mjl_task_step(model, q, params, spec);
    default:
      return distractor_step(model, q, t, params, spec, state, lambda);
  }
}

}  // namespace sotevo
