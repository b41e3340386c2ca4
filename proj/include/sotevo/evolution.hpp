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

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sotevo/episode.hpp"

namespace sotevo {

enum class Phase { order_only, params, joint };

std::string phase_name(Phase phase);
Phase phase_from_name(const std::string& name);

struct MutationWeights {
  double swap_order = 1.0;
  double perturb_param = 1.0;
  double flip_active = 1.0;
};

struct GpConfig {
  int population_size = 8;  // even, >= 4
  int max_generations = 20;
  double crossover_prob = 0.5;
  MutationWeights mutation_weights;
  double param_sigma = 0.1;  // Gaussian scale as a fraction of bound width
  double convergence_threshold = 2.0;
  int episodes_per_individual = 2;
  Phase phase = Phase::order_only;
  std::uint64_t master_seed = 1;
  int workers = 1;
  /// Task ids defining the initial order for the params phase; defaults to
  /// the dictionary order when empty.
  std::vector<std::string> benchmark_order;

  void validate(const TaskDictionary& dict) const;
  /// Weights actually used: the order phase mutates order only.
  MutationWeights effective_weights() const;
};

struct Scenario {
  RobotModel model;
  World world;
  TaskDictionary dict;
  CostSpec cost;
  EpisodeConfig episode;

  void validate() const;
};

struct GenerationRecord {
  int generation = 0;
  std::vector<double> costs;
  StackOfTasks best;
  double best_cost = 0.0;
  double mean_cost = 0.0;
  /// Fraction of individuals whose active order equals the final best's.
  double order_match_pct = 0.0;
  double max_pairwise_dist = 0.0;
  /// Best individual's smallest distractor rank among active entries;
  /// an inactive distractor counts as the task count, -1 when the
  /// dictionary has no distractors.
  int distractor_min_rank = -1;
};

using Population = std::vector<StackOfTasks>;

Population init_population(const TaskDictionary& dict, const GpConfig& cfg,
                           std::mt19937_64& rng);

/// Runs episodes for every cost-unset individual. All individuals of a
/// generation face the same episode seeds (common random numbers); the
/// individual's cost is the mean episode cost.
void evaluate_population(Population& pop, const Scenario& scenario,
                         const GpConfig& cfg, int generation);

/// Binary tournament over an explicit disjoint pairing (index pairs);
/// each pair's cheaper member survives, exact ties decided by coin flip.
Population tournament_select_paired(
    const Population& pop, const std::vector<std::pair<int, int>>& pairs,
    std::mt19937_64& rng);

/// Random disjoint pairing followed by tournament_select_paired.
Population tournament_select(const Population& pop, std::mt19937_64& rng);

/// Order crossover at an explicit cut: the first `cut` entries come from
/// `a`, the rest follow `b`'s relative order with `b`'s payloads.
StackOfTasks crossover_at(const StackOfTasks& a, const StackOfTasks& b,
                          int cut);

StackOfTasks crossover(const StackOfTasks& a, const StackOfTasks& b,
                       std::mt19937_64& rng);

/// Applies exactly one mutation operator sampled by the configured weights.
StackOfTasks mutate(const StackOfTasks& a, const TaskDictionary& dict,
                    const GpConfig& cfg, std::mt19937_64& rng);

/// True when the largest pairwise stack distance falls below the threshold.
bool check_convergence(const Population& pop, double threshold);

struct EvolutionResult {
  StackOfTasks best;
  std::vector<GenerationRecord> records;
};

/// The full learning loop: evaluate, record, select half, refill with one
/// offspring per survivor, until convergence or the generation budget.
/// Deterministic in master_seed for any worker count.
EvolutionResult run_evolution(const Scenario& scenario, const GpConfig& cfg,
                              std::optional<Population> initial = std::nullopt);

/// generations.csv content for the records
/// (gen,best_cost,mean_cost,order_match_pct,max_pairwise_dist,distractor_min_rank).
std::string generations_csv(const std::vector<GenerationRecord>& records);

}  // namespace sotevo
