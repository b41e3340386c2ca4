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

#include <cstdint>
#include <string>
#include <vector>

#include "sotevo/kinematics.hpp"
#include "sotevo/tasks.hpp"

namespace sotevo {

struct Circle {
  double x = 0.0, y = 0.0;
  double radius = 0.0;
};

struct Segment {
  double x1 = 0.0, y1 = 0.0;
  double x2 = 0.0, y2 = 0.0;
};

/// Scripted disc moving along piecewise-linear waypoints at constant speed,
/// holding the final waypoint once reached.
struct DynamicObstacle {
  double radius = 0.0;
  double speed = 0.0;  // m/s
  std::vector<Eigen::Vector2d> waypoints;

  Circle at(double t) const;
};

struct World {
  std::vector<Circle> circles;
  std::vector<Segment> segments;
  std::vector<DynamicObstacle> movers;
  Pose2D goal;
  double max_range = 5.0;

  void validate(const RobotModel& model) const;
};

/// 360 per-degree ray distances around the base, measured from the chassis
/// edge, capped at max_range.
struct SensorScan {
  Eigen::VectorXd distances;
  double max_range = 0.0;
};

/// Casts the full circular map at time t: two co-located 270-degree scanner
/// fields (front centered on the heading, rear opposite) are merged into one
/// 360-ray map; the front field owns [-90, +90] degrees, the rear the rest.
SensorScan scan(const World& world, const RobotModel& model,
                const Pose2D& base_pose, double t);

/// Exact distance from the chassis disc to the nearest obstacle surface.
double min_obstacle_clearance(const World& world, const RobotModel& model,
                              const Pose2D& base_pose, double t);

struct InitRandomization {
  Eigen::VectorXd nominal_q;
  double base_xy_range = 0.0;
  double base_theta_range = 0.0;
  double arm_range = 0.0;
  double clearance_margin = 0.05;
};

struct EpisodeConfig {
  double dt = 0.01;
  double max_time = 20.0;
  double goal_tolerance = 0.05;
  double collision_distance = 0.05;
  double epsilon_limit = 5.0;  // 1/s, joint-limit velocity shaping gain
  double cap_base_linear = 1.0;
  double cap_base_angular = 2.0;
  double cap_arm = 2.0;
  double damping_lambda = 1e-3;
  double singularity_w_floor = 1e-6;
  InitRandomization init;

  void validate(const RobotModel& model) const;
};

enum class TerminationReason { goal_reached, timeout, collision, singularity };

std::string termination_name(TerminationReason reason);

struct TraceRow {
  double t = 0.0;
  Eigen::VectorXd q;
  Pose2D pose;
  Eigen::Vector3d err_vec;  // goal (-) pose
  double err_norm = 0.0;
  double min_ray = 0.0;
  std::vector<double> violations;  // ray distances below the record threshold
  double w = 0.0;      // arm manipulability
  double w_mjl = 0.0;  // joint-limit measure
  Eigen::VectorXd qdot;
};

struct EpisodeTrace {
  std::vector<TraceRow> rows;
  TerminationReason termination = TerminationReason::timeout;
  double termination_time = 0.0;
  double dt = 0.0;
  double record_threshold = 0.0;

  double duration() const { return termination_time; }
  double min_ray_over_episode() const;
  /// First instant the goal error stays within tol; negative when never.
  double goal_attainment_time(double tol) const;

  /// CSV with header t,q_0..q_{n-1},err_norm,min_ray,w,w_mjl,qdot_0..
  std::string to_csv() const;
};

/// Per-joint velocity shaping toward limits followed by per-DOF caps.
Eigen::VectorXd clamp_velocities(const Eigen::VectorXd& qdot,
                                 const Eigen::VectorXd& q,
                                 const RobotModel& model,
                                 const EpisodeConfig& cfg);

/// Rejection-samples a collision-free initial configuration around the
/// nominal one. Throws InfeasibleError after 1000 attempts.
Eigen::VectorXd randomize_initial(const EpisodeConfig& cfg,
                                  const RobotModel& model, const World& world,
                                  std::uint64_t seed);

}  // namespace sotevo
