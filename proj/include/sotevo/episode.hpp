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

#include "sotevo/cost.hpp"
#include "sotevo/stack.hpp"
#include "sotevo/world.hpp"

namespace sotevo {

struct EpisodeResult {
  EpisodeTrace trace;
  double cost = 0.0;
};

/// Simulates one mission: scan, evaluate the active tasks in priority
/// order, compose through null-space projection, clamp, integrate at dt.
/// Terminates on sustained goal attainment, timeout, collision, or arm
/// singularity. Fully deterministic in (seed, configs).
EpisodeResult run_episode(const StackOfTasks& stack, const World& world,
                          const RobotModel& model, const TaskDictionary& dict,
                          const CostSpec& cost_spec, const EpisodeConfig& cfg,
                          std::uint64_t seed);

}  // namespace sotevo
