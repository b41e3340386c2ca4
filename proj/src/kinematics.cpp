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

#include "sotevo/kinematics.hpp"

#include <Eigen/SVD>

#include "sotevo/errors.hpp"

namespace sotevo {

namespace {

void check_dims(const RobotModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.dof()) {
    throw ConfigError("configuration has " + std::to_string(q.size()) +
                      " entries, model expects " + std::to_string(model.dof()));
  }
}

// Positions of every rotation axis along the chain plus the end effector.
// axes[0..base_dof-1] sit at the base origin; axes[base_dof + i] is arm
// joint i; the final entry is the end-effector point.
struct ChainPoints {
  std::vector<Eigen::Vector2d> axes;
  Eigen::Vector2d ee;
  double ee_heading = 0.0;
};

ChainPoints chain_points(const RobotModel& model, const Eigen::VectorXd& q) {
  ChainPoints out;
  const int nb = model.base_dof();
  Eigen::Vector2d p(0.0, 0.0);
  double heading = 0.0;
  if (model.base_enabled) {
    p << q[0], q[1];
    heading = q[2];
    out.axes.push_back(p);  // base x
    out.axes.push_back(p);  // base y
    out.axes.push_back(p);  // base theta
  }
  for (int i = 0; i < model.arm_dof(); ++i) {
    out.axes.push_back(p);
    heading += q[nb + i];
    p += model.arm_link_lengths[static_cast<size_t>(i)] *
         Eigen::Vector2d(std::cos(heading), std::sin(heading));
  }
  out.ee = p;
  out.ee_heading = heading;
  return out;
}

}  // namespace

void RobotModel::validate() const {
  if (arm_link_lengths.size() != arm_joint_limits.size()) {
    throw ConfigError("robot: " + std::to_string(arm_link_lengths.size()) +
                      " links but " + std::to_string(arm_joint_limits.size()) +
                      " joint limit pairs");
  }
  for (size_t i = 0; i < arm_link_lengths.size(); ++i) {
    if (!(arm_link_lengths[i] > 0.0)) {
      throw ConfigError("robot: link " + std::to_string(i) +
                        " length must be > 0");
    }
    if (!(arm_joint_limits[i].min < arm_joint_limits[i].max)) {
      throw ConfigError("robot: joint " + std::to_string(i) +
                        " limits must satisfy min < max");
    }
  }
  if (!(workspace.x_min < workspace.x_max) ||
      !(workspace.y_min < workspace.y_max)) {
    throw ConfigError("robot: workspace bounds must be ordered");
  }
  if (dof() == 0) throw ConfigError("robot: no degrees of freedom");
}

Eigen::Vector3d pose_error(const Pose2D& desired, const Pose2D& current) {
  return {desired.x - current.x, desired.y - current.y,
          angle_diff(desired.phi, current.phi)};
}

Pose2D forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  check_dims(model, q);
  const ChainPoints c = chain_points(model, q);
  return {c.ee.x(), c.ee.y(), wrap_angle(c.ee_heading)};
}

Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& q) {
  check_dims(model, q);
  const int n = model.dof();
  const ChainPoints c = chain_points(model, q);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(kTaskDim, n);
  int col = 0;
  if (model.base_enabled) {
    J.col(0) << 1.0, 0.0, 0.0;
    J.col(1) << 0.0, 1.0, 0.0;
    J.col(2) << -(c.ee.y() - q[1]), c.ee.x() - q[0], 1.0;
    col = 3;
  }
  for (int i = 0; i < model.arm_dof(); ++i, ++col) {
    const Eigen::Vector2d& p = c.axes[static_cast<size_t>(col)];
    J.col(col) << -(c.ee.y() - p.y()), c.ee.x() - p.x(), 1.0;
  }
  return J;
}

Eigen::MatrixXd arm_positional_jacobian(const RobotModel& model,
                                        const Eigen::VectorXd& q) {
  check_dims(model, q);
  const int na = model.arm_dof();
  const int nb = model.base_dof();
  const ChainPoints c = chain_points(model, q);
  Eigen::MatrixXd J(2, na);
  for (int i = 0; i < na; ++i) {
    const Eigen::Vector2d& p = c.axes[static_cast<size_t>(nb + i)];
    J.col(i) << -(c.ee.y() - p.y()), c.ee.x() - p.x();
  }
  return J;
}

Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& J,
                                      double lambda) {
  if (J.size() == 0) throw ConfigError("pseudo-inverse of an empty matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXd inv_sv(sv.size());
  if (lambda == 0.0) {
    const double tol = sv.size() > 0
                           ? sv(0) * std::max(J.rows(), J.cols()) *
                                 std::numeric_limits<double>::epsilon()
                           : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) <= tol) {
        throw SingularityError("exact pseudo-inverse of a rank-deficient " +
                               std::to_string(J.rows()) + "x" +
                               std::to_string(J.cols()) + " matrix");
      }
      inv_sv(i) = 1.0 / sv(i);
    }
  } else {
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      inv_sv(i) = sv(i) / (sv(i) * sv(i) + lambda * lambda);
    }
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

double manipulability(const Eigen::MatrixXd& J) {
  if (J.size() == 0) throw ConfigError("manipulability of an empty Jacobian");
  const double d = (J * J.transpose()).determinant();
  return d > 0.0 ? std::sqrt(d) : 0.0;
}

double arm_manipulability(const RobotModel& model, const Eigen::VectorXd& q) {
  if (model.arm_dof() == 0) return 0.0;
  return manipulability(arm_positional_jacobian(model, q));
}

ManipulabilityGradient manipulability_gradient(const RobotModel& model,
                                               const Eigen::VectorXd& q) {
  check_dims(model, q);
  const int n = model.dof();
  const int na = model.arm_dof();
  const int nb = model.base_dof();
  ManipulabilityGradient out;
  out.gradient = Eigen::VectorXd::Zero(n);
  if (na == 0) {
    out.near_singular = true;
    return out;
  }

  const ChainPoints c = chain_points(model, q);
  const Eigen::MatrixXd J = arm_positional_jacobian(model, q);
  const double w = manipulability(J);
  constexpr double kSingularFloor = 1e-9;
  if (w < kSingularFloor) {
    out.near_singular = true;
    return out;
  }
  const Eigen::Matrix2d jjt_inv = (J * J.transpose()).inverse();

  // dJ/dq_k column j needs the point Jacobians of the end effector and of
  // arm axis j. For a planar revolute chain, d p / d q_k is the usual
  // perpendicular lever arm when axis k precedes p, zero otherwise.
  auto point_vel = [&](const Eigen::Vector2d& p, int axis_arm_idx,
                       int wrt_arm_idx) -> Eigen::Vector2d {
    // Derivative of arm point p (axis of joint axis_arm_idx, or EE when
    // axis_arm_idx == na) w.r.t. arm joint wrt_arm_idx.
    if (wrt_arm_idx >= axis_arm_idx) return Eigen::Vector2d::Zero();
    const Eigen::Vector2d& a = c.axes[static_cast<size_t>(nb + wrt_arm_idx)];
    return {-(p.y() - a.y()), p.x() - a.x()};
  };

  for (int k = 0; k < na; ++k) {
    Eigen::MatrixXd dJ(2, na);
    const Eigen::Vector2d dee = point_vel(c.ee, na, k);
    for (int j = 0; j < na; ++j) {
      const Eigen::Vector2d& pj = c.axes[static_cast<size_t>(nb + j)];
      const Eigen::Vector2d dpj = point_vel(pj, j, k);
      dJ.col(j) << -(dee.y() - dpj.y()), dee.x() - dpj.x();
    }
    out.gradient[nb + k] = w * (jjt_inv * dJ * J.transpose()).trace();
  }
  return out;
}

double joint_limit_measure(const RobotModel& model, const Eigen::VectorXd& q) {
  check_dims(model, q);
  const int na = model.arm_dof();
  if (na == 0) return 0.0;
  const int nb = model.base_dof();
  double acc = 0.0;
  for (int i = 0; i < na; ++i) {
    const JointLimit& lim = model.arm_joint_limits[static_cast<size_t>(i)];
    const double r = (q[nb + i] - lim.mid()) / lim.range();
    acc += r * r;
  }
  return -acc / (2.0 * na);
}

Eigen::VectorXd joint_limit_gradient(const RobotModel& model,
                                     const Eigen::VectorXd& q) {
  check_dims(model, q);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(model.dof());
  const int na = model.arm_dof();
  if (na == 0) return g;
  const int nb = model.base_dof();
  for (int i = 0; i < na; ++i) {
    const JointLimit& lim = model.arm_joint_limits[static_cast<size_t>(i)];
    g[nb + i] = -(q[nb + i] - lim.mid()) / (lim.range() * lim.range() * na);
  }
  return g;
}

}  // namespace sotevo
