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

#include "sotevo/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sotevo/errors.hpp"
#include "sotevo/seed.hpp"

namespace sotevo {

namespace {

constexpr double kMinRayReading = 1e-6;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Smallest non-negative ray parameter hitting the circle, or +inf.
double ray_circle(const Eigen::Vector2d& o, const Eigen::Vector2d& u,
                  const Circle& c) {
  const Eigen::Vector2d oc(c.x - o.x(), c.y - o.y());
  const double proj = u.dot(oc);
  const double disc = proj * proj - (oc.squaredNorm() - c.radius * c.radius);
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double root = std::sqrt(disc);
  const double t1 = proj - root;
  if (t1 >= 0.0) return t1;
  const double t2 = proj + root;
  if (t2 >= 0.0) return 0.0;  // origin inside the disc
  return std::numeric_limits<double>::infinity();
}

double ray_segment(const Eigen::Vector2d& o, const Eigen::Vector2d& u,
                   const Segment& s) {
  const Eigen::Vector2d p1(s.x1, s.y1), p2(s.x2, s.y2);
  const Eigen::Vector2d d = p2 - p1;
  const double denom = cross2(u, d);
  if (std::abs(denom) < 1e-12) return std::numeric_limits<double>::infinity();
  const Eigen::Vector2d w = p1 - o;
  const double t = cross2(w, d) / denom;
  const double s_par = cross2(w, u) / denom;
  if (t >= 0.0 && s_par >= 0.0 && s_par <= 1.0) return t;
  return std::numeric_limits<double>::infinity();
}

double point_segment_distance(const Eigen::Vector2d& p, const Segment& s) {
  const Eigen::Vector2d p1(s.x1, s.y1), p2(s.x2, s.y2);
  const Eigen::Vector2d d = p2 - p1;
  const double len2 = d.squaredNorm();
  if (len2 < 1e-18) return (p - p1).norm();
  const double u = std::clamp((p - p1).dot(d) / len2, 0.0, 1.0);
  return (p - p1 - u * d).norm();
}

double cast_ray(const World& world, const Eigen::Vector2d& o,
                const Eigen::Vector2d& u, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const Circle& c : world.circles) best = std::min(best, ray_circle(o, u, c));
  for (const Segment& s : world.segments) best = std::min(best, ray_segment(o, u, s));
  for (const DynamicObstacle& m : world.movers) {
    best = std::min(best, ray_circle(o, u, m.at(t)));
  }
  return best;
}

// Body-frame degree owned by the front scanner field.
bool front_owns(int deg) { return deg <= 90 || deg >= 270; }

// Is `deg` within a 270-degree field centered on `center_deg`?
bool in_field(int deg, int center_deg) {
  int rel = (deg - center_deg) % 360;
  if (rel < 0) rel += 360;
  if (rel > 180) rel -= 360;
  return std::abs(rel) <= 135;
}

}  // namespace

Circle DynamicObstacle::at(double t) const {
  Circle c;
  c.radius = radius;
  if (waypoints.empty()) return c;
  Eigen::Vector2d p = waypoints.front();
  double travel = std::max(0.0, speed * t);
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Eigen::Vector2d leg = waypoints[i + 1] - waypoints[i];
    const double len = leg.norm();
    if (travel <= len || len == 0.0) {
      p = waypoints[i] + (len > 0.0 ? travel / len : 0.0) * leg;
      c.x = p.x();
      c.y = p.y();
      return c;
    }
    travel -= len;
  }
  p = waypoints.back();
  c.x = p.x();
  c.y = p.y();
  return c;
}

void World::validate(const RobotModel& model) const {
  for (const Circle& c : circles) {
    if (!(c.radius > 0.0)) throw ConfigError("world: circle radius must be > 0");
  }
  for (const DynamicObstacle& m : movers) {
    if (!(m.radius > 0.0)) throw ConfigError("world: mover radius must be > 0");
    if (m.waypoints.empty()) throw ConfigError("world: mover has no waypoints");
    if (m.speed < 0.0) throw ConfigError("world: mover speed must be >= 0");
  }
  for (const Segment& s : segments) {
    if (s.x1 == s.x2 && s.y1 == s.y2) {
      throw ConfigError("world: degenerate segment");
    }
  }
  const WorkspaceBounds& b = model.workspace;
  if (goal.x < b.x_min || goal.x > b.x_max || goal.y < b.y_min ||
      goal.y > b.y_max) {
    throw ConfigError("world: goal outside the workspace bounds");
  }
  if (!(max_range > 0.0)) throw ConfigError("world: max_range must be > 0");
}

SensorScan scan(const World& world, const RobotModel& model,
                const Pose2D& base_pose, double t) {
  SensorScan out;
  out.max_range = world.max_range;
  out.distances.resize(kScanRays);
  const Eigen::Vector2d origin(base_pose.x, base_pose.y);

  // Both fields are chassis-centered, so each degree is cast once and the
  // merge reduces to ownership: front takes [-90, 90], rear the rest. The
  // field membership assertion keeps the full circumference covered.
  for (int deg = 0; deg < kScanRays; ++deg) {
    const bool covered = front_owns(deg) ? in_field(deg, 0) : in_field(deg, 180);
    if (!covered) throw ConfigError("scan: degree uncovered by its field");
    const double ang = base_pose.phi + deg * (M_PI / 180.0);
    const Eigen::Vector2d u(std::cos(ang), std::sin(ang));
    const double hit = cast_ray(world, origin, u, t);
    const double edge = hit - model.base_radius;
    out.distances[deg] =
        std::clamp(edge, kMinRayReading, world.max_range);
  }
  return out;
}

double min_obstacle_clearance(const World& world, const RobotModel& model,
                              const Pose2D& base_pose, double t) {
  const Eigen::Vector2d p(base_pose.x, base_pose.y);
  double best = std::numeric_limits<double>::infinity();
  for (const Circle& c : world.circles) {
    best = std::min(best, (p - Eigen::Vector2d(c.x, c.y)).norm() - c.radius);
  }
  for (const Segment& s : world.segments) {
    best = std::min(best, point_segment_distance(p, s));
  }
  for (const DynamicObstacle& m : world.movers) {
    const Circle c = m.at(t);
    best = std::min(best, (p - Eigen::Vector2d(c.x, c.y)).norm() - c.radius);
  }
  return best - model.base_radius;
}

void EpisodeConfig::validate(const RobotModel& model) const {
  if (!(dt > 0.0)) throw ConfigError("episode: dt must be > 0");
  if (!(max_time > dt)) throw ConfigError("episode: max_time must exceed dt");
  if (!(epsilon_limit > 0.0)) throw ConfigError("episode: epsilon_limit must be > 0");
  if (epsilon_limit * dt > 1.0) {
    throw ConfigError("episode: epsilon_limit * dt must be <= 1 so the "
                      "velocity shaping cannot overshoot a joint limit");
  }
  if (!(goal_tolerance > 0.0)) throw ConfigError("episode: goal_tolerance must be > 0");
  if (collision_distance < 0.0) throw ConfigError("episode: collision_distance must be >= 0");
  if (!(cap_base_linear > 0.0) || !(cap_base_angular > 0.0) || !(cap_arm > 0.0)) {
    throw ConfigError("episode: velocity caps must be > 0");
  }
  if (damping_lambda < 0.0) throw ConfigError("episode: damping_lambda must be >= 0");
  if (init.nominal_q.size() != model.dof()) {
    throw ConfigError("episode: nominal_q has " +
                      std::to_string(init.nominal_q.size()) +
                      " entries, model expects " + std::to_string(model.dof()));
  }
  if (init.base_xy_range < 0.0 || init.base_theta_range < 0.0 ||
      init.arm_range < 0.0) {
    throw ConfigError("episode: randomization ranges must be >= 0");
  }
}

std::string termination_name(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::goal_reached: return "goal_reached";
    case TerminationReason::timeout: return "timeout";
    case TerminationReason::collision: return "collision";
    case TerminationReason::singularity: return "singularity";
  }
  return "unknown";
}

double EpisodeTrace::min_ray_over_episode() const {
  double best = std::numeric_limits<double>::infinity();
  for (const TraceRow& r : rows) best = std::min(best, r.min_ray);
  return best;
}

double EpisodeTrace::goal_attainment_time(double tol) const {
  for (const TraceRow& r : rows) {
    if (r.err_norm <= tol) return r.t;
  }
  return -1.0;
}

std::string EpisodeTrace::to_csv() const {
  std::string out;
  if (rows.empty()) return out;
  const int n = static_cast<int>(rows.front().q.size());
  out += "t";
  for (int i = 0; i < n; ++i) out += ",q_" + std::to_string(i);
  out += ",err_norm,min_ray,w,w_mjl";
  for (int i = 0; i < n; ++i) out += ",qdot_" + std::to_string(i);
  out += "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
  };
  for (const TraceRow& r : rows) {
    put(r.t);
    for (int i = 0; i < n; ++i) { out += ','; put(r.q[i]); }
    out += ','; put(r.err_norm);
    out += ','; put(r.min_ray);
    out += ','; put(r.w);
    out += ','; put(r.w_mjl);
    for (int i = 0; i < n; ++i) { out += ','; put(r.qdot[i]); }
    out += "\n";
  }
  return out;
}

Eigen::VectorXd clamp_velocities(const Eigen::VectorXd& qdot,
                                 const Eigen::VectorXd& q,
                                 const RobotModel& model,
                                 const EpisodeConfig& cfg) {
  Eigen::VectorXd out = qdot;
  const int nb = model.base_dof();
  if (model.base_enabled) {
    out[0] = std::clamp(out[0], -cfg.cap_base_linear, cfg.cap_base_linear);
    out[1] = std::clamp(out[1], -cfg.cap_base_linear, cfg.cap_base_linear);
    out[2] = std::clamp(out[2], -cfg.cap_base_angular, cfg.cap_base_angular);
  }
  for (int i = 0; i < model.arm_dof(); ++i) {
    const JointLimit& lim = model.arm_joint_limits[static_cast<size_t>(i)];
    const double lo = cfg.epsilon_limit * (lim.min - q[nb + i]);
    const double hi = cfg.epsilon_limit * (lim.max - q[nb + i]);
    out[nb + i] = std::clamp(out[nb + i], std::min(lo, hi), std::max(lo, hi));
    out[nb + i] = std::clamp(out[nb + i], -cfg.cap_arm, cfg.cap_arm);
  }
  return out;
}

Eigen::VectorXd randomize_initial(const EpisodeConfig& cfg,
                                  const RobotModel& model, const World& world,
                                  std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int nb = model.base_dof();
  const Eigen::VectorXd& nom = cfg.init.nominal_q;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::VectorXd q = nom;
    if (model.base_enabled) {
      q[0] = std::clamp(nom[0] + cfg.init.base_xy_range * unit(rng),
                        model.workspace.x_min, model.workspace.x_max);
      q[1] = std::clamp(nom[1] + cfg.init.base_xy_range * unit(rng),
                        model.workspace.y_min, model.workspace.y_max);
      q[2] = wrap_angle(nom[2] + cfg.init.base_theta_range * unit(rng));
    }
    for (int i = 0; i < model.arm_dof(); ++i) {
      const JointLimit& lim = model.arm_joint_limits[static_cast<size_t>(i)];
      const double v = nom[nb + i] + cfg.init.arm_range * unit(rng);
      q[nb + i] = std::clamp(v, lim.min, lim.max);
    }
    const Pose2D base = model.base_enabled ? Pose2D{q[0], q[1], q[2]} : Pose2D{};
    const double clearance = min_obstacle_clearance(world, model, base, 0.0);
    if (clearance > cfg.collision_distance + cfg.init.clearance_margin) {
      return q;
    }
  }
  throw InfeasibleError(
      "no collision-free initial configuration found in 1000 draws");
}

}  // namespace sotevo
