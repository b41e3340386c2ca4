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

#include <string>
#include <vector>

#include "sotevo/world.hpp"

namespace sotevo {

enum class CostOp {
  precision,
  precision_position,
  precision_orientation,
  safety_all,
  safety_min,
  max_manip,
  max_mjl,
  time,
};

std::string cost_op_name(CostOp op);
CostOp cost_op_from_name(const std::string& name);

struct CostTerm {
  CostOp op = CostOp::precision;
  double weight = 0.0;
  double scale = 1.0;        // normalization divisor s_i
  double rest_length = 0.5;  // safety operators only
};

/// The user's fitness measure: weighted normalized terms plus a flat
/// penalty for collided or singular episodes.
struct CostSpec {
  std::vector<CostTerm> terms;
  double collision_penalty = 1e3;
  double goal_tolerance = 0.05;

  /// Weights must be >= 0 and sum to 1 (within 1e-9); scales > 0.
  void validate() const;
  /// Largest safety rest length, i.e. the ray-recording threshold traces
  /// need so every safety term can be recomputed from them.
  double record_threshold() const;
};

// Cost operators over a finished episode trace.

enum class PrecisionMode { full, position, orientation };
double cost_precision(const EpisodeTrace& trace,
                      PrecisionMode mode = PrecisionMode::full);

enum class SafetyMode { all, min };
double cost_safety(const EpisodeTrace& trace, SafetyMode mode,
                   double rest_length);

double cost_manip(const EpisodeTrace& trace);
double cost_mjl(const EpisodeTrace& trace);
double cost_time(const EpisodeTrace& trace, double goal_tolerance);

/// Raw (unscaled) value of one term on a trace.
double raw_cost_term(const CostTerm& term, const EpisodeTrace& trace,
                     double goal_tolerance);

/// C = sum_i alpha_i cost_i / s_i, plus the penalty once per breaking
/// condition (collision, singularity).
double combine(const CostSpec& spec, const EpisodeTrace& trace);

/// Worst-case non-collided cost estimate used by the load-time calibration
/// check; collision dominance requires the penalty to exceed it.
double collision_dominance_bound(const CostSpec& spec, const RobotModel& model,
                                 const EpisodeConfig& episode);

}  // namespace sotevo
