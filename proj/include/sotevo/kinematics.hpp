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

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace sotevo {

/// Planar task space: m = 3 (x, y, phi).
inline constexpr int kTaskDim = 3;

struct JointLimit {
  double min = 0.0;
  double max = 0.0;
  double mid() const { return 0.5 * (min + max); }
  double range() const { return max - min; }
};

struct WorkspaceBounds {
  double x_min = -5.0, x_max = 5.0;
  double y_min = -5.0, y_max = 5.0;
};

/// Planar robot: optional holonomic base (x, y, theta prepended to the
/// configuration vector) followed by a serial revolute arm.
struct RobotModel {
  bool base_enabled = true;
  double base_radius = 0.15;  // chassis disc, used by sensing and collision
  std::vector<double> arm_link_lengths;
  std::vector<JointLimit> arm_joint_limits;  // one per arm link
  WorkspaceBounds workspace;

  int base_dof() const { return base_enabled ? 3 : 0; }
  int arm_dof() const { return static_cast<int>(arm_link_lengths.size()); }
  int dof() const { return base_dof() + arm_dof(); }
  bool redundant() const { return dof() > kTaskDim; }

  /// Throws ConfigError on non-positive links, reversed limits, or a
  /// limit/link count mismatch.
  void validate() const;
};

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  return (r <= -M_PI) ? r + 2.0 * M_PI : r;
}

/// Shortest signed angular difference a - b, in (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// Pose error `desired (-) current` with wrapped angular component.
Eigen::Vector3d pose_error(const Pose2D& desired, const Pose2D& current);

/// End-effector pose of the full chain (base frame composed with the arm).
/// Pure in (model, q); throws ConfigError on a dimension mismatch.
Pose2D forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

/// Analytic 3 x n Jacobian of forward_kinematics (rows x, y, phi).
Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& q);

/// 2 x arm_dof positional Jacobian of the arm sub-chain. This is the matrix
/// whose manipulability the max-manipulability task optimizes; it is
/// invariant to the base pose.
Eigen::MatrixXd arm_positional_jacobian(const RobotModel& model,
                                        const Eigen::VectorXd& q);

/// Damped pseudo-inverse via SVD: singular values sigma map to
/// sigma / (sigma^2 + lambda^2). With lambda = 0 this is the Moore-Penrose
/// inverse; rank deficiency then raises SingularityError.
Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& J, double lambda);

/// w = sqrt(det(J J^T)), clamped at zero against roundoff.
double manipulability(const Eigen::MatrixXd& J);

/// Manipulability of the arm positional Jacobian; 0 for armless models.
double arm_manipulability(const RobotModel& model, const Eigen::VectorXd& q);

struct ManipulabilityGradient {
  Eigen::VectorXd gradient;   // length n; base components are zero
  bool near_singular = false; // w below threshold, gradient zeroed
};

/// Gradient of arm_manipulability w.r.t. q, from the analytic Jacobian
/// partial derivatives: dw/dq_k = w * tr((J J^T)^-1 dJ/dq_k J^T).
ManipulabilityGradient manipulability_gradient(const RobotModel& model,
                                               const Eigen::VectorXd& q);

/// Joint-limit distance measure over the limited (arm) joints:
/// w = -(1/2n) sum_i ((q_i - mid_i) / range_i)^2, zero at mid-range.
double joint_limit_measure(const RobotModel& model, const Eigen::VectorXd& q);

/// Gradient of joint_limit_measure; component i is
/// -(1/n) (q_i - mid_i) / range_i^2 for arm joints, zero for base DOFs.
Eigen::VectorXd joint_limit_gradient(const RobotModel& model,
                                     const Eigen::VectorXd& q);

}  // namespace sotevo
