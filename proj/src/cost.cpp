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

#include "sotevo/cost.hpp"

#include <cmath>
#include <numeric>

#include "sotevo/errors.hpp"

namespace sotevo {

namespace {

constexpr double kManipFloor = 1e-6;

double time_average(const EpisodeTrace& trace,
                    double (*per_row)(const TraceRow&, double), double arg) {
  if (trace.rows.empty()) return 0.0;
  double acc = 0.0;
  for (const TraceRow& r : trace.rows) acc += per_row(r, arg);
  return acc / static_cast<double>(trace.rows.size());
}

}  // namespace

std::string cost_op_name(CostOp op) {
  switch (op) {
    case CostOp::precision: return "precision";
    case CostOp::precision_position: return "precision_position";
    case CostOp::precision_orientation: return "precision_orientation";
    case CostOp::safety_all: return "safety_all";
    case CostOp::safety_min: return "safety_min";
    case CostOp::max_manip: return "max_manip";
    case CostOp::max_mjl: return "max_mjl";
    case CostOp::time: return "time";
  }
  return "unknown";
}

CostOp cost_op_from_name(const std::string& name) {
  for (CostOp op : {CostOp::precision, CostOp::precision_position,
                    CostOp::precision_orientation, CostOp::safety_all,
                    CostOp::safety_min, CostOp::max_manip, CostOp::max_mjl,
                    CostOp::time}) {
    if (cost_op_name(op) == name) return op;
  }
  throw ConfigError("unknown cost operator '" + name + "'");
}

void CostSpec::validate() const {
  if (terms.empty()) throw ConfigError("cost: no terms");
  double sum = 0.0;
  for (const CostTerm& t : terms) {
    if (t.weight < 0.0) {
      throw ConfigError("cost: term '" + cost_op_name(t.op) +
                        "' has negative weight");
    }
    if (!(t.scale > 0.0)) {
      throw ConfigError("cost: term '" + cost_op_name(t.op) +
                        "' needs scale > 0");
    }
    if ((t.op == CostOp::safety_all || t.op == CostOp::safety_min) &&
        !(t.rest_length > 0.0)) {
      throw ConfigError("cost: term '" + cost_op_name(t.op) +
                        "' needs rest_length > 0");
    }
    sum += t.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("cost: weights sum to " + std::to_string(sum) +
                      ", expected 1");
  }
  if (!(collision_penalty > 0.0)) {
    throw ConfigError("cost: collision_penalty must be > 0");
  }
  if (!(goal_tolerance > 0.0)) {
    throw ConfigError("cost: goal_tolerance must be > 0");
  }
}

double CostSpec::record_threshold() const {
  double r = 0.0;
  for (const CostTerm& t : terms) {
    if (t.op == CostOp::safety_all) r = std::max(r, t.rest_length);
  }
  return r;
}

double cost_precision(const EpisodeTrace& trace, PrecisionMode mode) {
  if (trace.rows.empty()) return 0.0;
  const Eigen::Vector3d& e = trace.rows.back().err_vec;
  switch (mode) {
    case PrecisionMode::full: return e.squaredNorm();
    case PrecisionMode::position: return e.head<2>().squaredNorm();
    case PrecisionMode::orientation: return e[2] * e[2];
  }
  return 0.0;
}

double cost_safety(const EpisodeTrace& trace, SafetyMode mode,
                   double rest_length) {
  if (!(rest_length > 0.0)) throw ConfigError("cost_safety: rest_length must be > 0");
  if (mode == SafetyMode::all && rest_length > trace.record_threshold() + 1e-12 &&
      trace.record_threshold() > 0.0) {
    throw ConfigError("cost_safety: trace recorded violations only below " +
                      std::to_string(trace.record_threshold()));
  }
  if (trace.rows.empty()) return 0.0;
  double acc = 0.0;
  for (const TraceRow& r : trace.rows) {
    if (mode == SafetyMode::min) {
      if (r.min_ray < rest_length) {
        const double v = r.min_ray - rest_length;
        acc += 0.5 * v * v;
      }
    } else {
      for (double d : r.violations) {
        if (d < rest_length) {
          const double v = d - rest_length;
          acc += 0.5 * v * v;
        }
      }
    }
  }
  return acc / static_cast<double>(trace.rows.size());
}

double cost_manip(const EpisodeTrace& trace) {
  return time_average(
      trace,
      [](const TraceRow& r, double) {
        const double w = std::max(r.w, kManipFloor);
        return 1.0 / (w * w);
      },
      0.0);
}

double cost_mjl(const EpisodeTrace& trace) {
  return time_average(
      trace, [](const TraceRow& r, double) { return r.w_mjl * r.w_mjl; }, 0.0);
}

double cost_time(const EpisodeTrace& trace, double goal_tolerance) {
  const double t_goal = trace.goal_attainment_time(goal_tolerance);
  const double t = t_goal >= 0.0 ? t_goal : trace.duration();
  return t * t;
}

double raw_cost_term(const CostTerm& term, const EpisodeTrace& trace,
                     double goal_tolerance) {
  switch (term.op) {
    case CostOp::precision: return cost_precision(trace);
    case CostOp::precision_position:
      return cost_precision(trace, PrecisionMode::position);
    case CostOp::precision_orientation:
      return cost_precision(trace, PrecisionMode::orientation);
    case CostOp::safety_all:
      return cost_safety(trace, SafetyMode::all, term.rest_length);
    case CostOp::safety_min:
      return cost_safety(trace, SafetyMode::min, term.rest_length);
    case CostOp::max_manip: return cost_manip(trace);
    case CostOp::max_mjl: return cost_mjl(trace);
    case CostOp::time: return cost_time(trace, goal_tolerance);
  }
  return 0.0;
}

double combine(const CostSpec& spec, const EpisodeTrace& trace) {
  double c = 0.0;
  for (const CostTerm& term : spec.terms) {
    const double raw = raw_cost_term(term, trace, spec.goal_tolerance);
    c += term.weight * raw / term.scale;
  }
  if (trace.termination == TerminationReason::collision) {
    c += spec.collision_penalty;
  }
  if (trace.termination == TerminationReason::singularity) {
    c += spec.collision_penalty;
  }
  return c;
}

double collision_dominance_bound(const CostSpec& spec, const RobotModel& model,
                                 const EpisodeConfig& episode) {
  const double dx = model.workspace.x_max - model.workspace.x_min;
  const double dy = model.workspace.y_max - model.workspace.y_min;
  const double reach =
      std::accumulate(model.arm_link_lengths.begin(),
                      model.arm_link_lengths.end(), 0.0);
  const double pos_span = std::hypot(dx, dy) + 2.0 * reach;
  double bound = 0.0;
  for (const CostTerm& t : spec.terms) {
    double raw = 0.0;
    switch (t.op) {
      case CostOp::precision: raw = pos_span * pos_span + M_PI * M_PI; break;
      case CostOp::precision_position: raw = pos_span * pos_span; break;
      case CostOp::precision_orientation: raw = M_PI * M_PI; break;
      case CostOp::safety_all:
        raw = kScanRays * 0.5 * t.rest_length * t.rest_length;
        break;
      case CostOp::safety_min: raw = 0.5 * t.rest_length * t.rest_length; break;
      case CostOp::max_manip: {
        const double w = std::max(episode.singularity_w_floor, kManipFloor);
        raw = 1.0 / (w * w);
        break;
      }
      case CostOp::max_mjl: raw = 0.125 * 0.125; break;
      case CostOp::time: raw = episode.max_time * episode.max_time; break;
    }
    bound += t.weight * raw / t.scale;
  }
  return bound;
}

}  // namespace sotevo
