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

#include "sotevo/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <thread>

#include "sotevo/errors.hpp"
#include "sotevo/seed.hpp"

namespace sotevo {

namespace {

// Seed stream tags: keep every random decision on its own derivation path.
constexpr std::uint64_t kStreamInit = 10;
constexpr std::uint64_t kStreamGeneration = 11;
constexpr std::uint64_t kStreamEpisode = 12;

Eigen::VectorXd uniform_params(const TaskSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(spec.params.size()));
  for (size_t p = 0; p < spec.params.size(); ++p) {
    const ParamSpec& ps = spec.params[p];
    // Sampled as max - u * width: lands in (min, max], respecting
    // exclusive lower bounds.
    v[static_cast<Eigen::Index>(p)] = ps.max - u01(rng) * (ps.max - ps.min);
  }
  return v;
}

std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

void ensure_one_active(StackOfTasks& s, std::mt19937_64& rng) {
  for (const TaskEntry& e : s.entries) {
    if (e.active) return;
  }
  std::uniform_int_distribution<int> pick(0, s.size() - 1);
  s.entries[static_cast<size_t>(pick(rng))].active = true;
}

int distractor_min_rank_of(const StackOfTasks& stack,
                           const TaskDictionary& dict) {
  bool any = false;
  int best = dict.size();
  int rank = 0;
  for (const TaskEntry& e : stack.entries) {
    const bool distractor = is_distractor(dict.at(e.task_id).kind);
    any = any || distractor;
    if (e.active) {
      if (distractor) best = std::min(best, rank);
      ++rank;
    }
  }
  return any ? best : -1;
}

}  // namespace

std::string phase_name(Phase phase) {
  switch (phase) {
    case Phase::order_only: return "order";
    case Phase::params: return "params";
    case Phase::joint: return "joint";
  }
  return "unknown";
}

Phase phase_from_name(const std::string& name) {
  if (name == "order" || name == "order_only") return Phase::order_only;
  if (name == "params") return Phase::params;
  if (name == "joint") return Phase::joint;
  throw ConfigError("unknown phase '" + name + "'");
}

MutationWeights GpConfig::effective_weights() const {
  if (phase == Phase::order_only) return {mutation_weights.swap_order, 0.0, 0.0};
  return mutation_weights;
}

void GpConfig::validate(const TaskDictionary& dict) const {
  if (population_size < 4 || population_size % 2 != 0) {
    throw ConfigError("gp: population_size must be an even integer >= 4");
  }
  if (max_generations < 0) throw ConfigError("gp: max_generations must be >= 0");
  if (crossover_prob < 0.0 || crossover_prob > 1.0) {
    throw ConfigError("gp: crossover_prob must be in [0, 1]");
  }
  const MutationWeights w = effective_weights();
  if (w.swap_order < 0.0 || w.perturb_param < 0.0 || w.flip_active < 0.0) {
    throw ConfigError("gp: mutation weights must be >= 0");
  }
  if (w.swap_order + w.perturb_param + w.flip_active <= 0.0) {
    throw ConfigError("gp: mutation weights sum to zero for this phase");
  }
  if (param_sigma < 0.0) throw ConfigError("gp: param_sigma must be >= 0");
  if (!(convergence_threshold > 0.0)) {
    throw ConfigError("gp: convergence_threshold must be > 0");
  }
  if (episodes_per_individual < 1) {
    throw ConfigError("gp: episodes_per_individual must be >= 1");
  }
  if (workers < 1) throw ConfigError("gp: workers must be >= 1");
  if (!benchmark_order.empty()) {
    if (static_cast<int>(benchmark_order.size()) != dict.size()) {
      throw ConfigError("gp: benchmark_order must list every dictionary task");
    }
    for (const std::string& id : benchmark_order) {
      if (dict.index_of(id) < 0) {
        throw ConfigError("gp: benchmark_order id '" + id + "' not in dictionary");
      }
    }
    for (size_t i = 0; i < benchmark_order.size(); ++i) {
      for (size_t j = i + 1; j < benchmark_order.size(); ++j) {
        if (benchmark_order[i] == benchmark_order[j]) {
          throw ConfigError("gp: benchmark_order repeats '" +
                            benchmark_order[i] + "'");
        }
      }
    }
  }
}

void Scenario::validate() const {
  model.validate();
  world.validate(model);
  dict.validate();
  cost.validate();
  episode.validate(model);
}

Population init_population(const TaskDictionary& dict, const GpConfig& cfg,
                           std::mt19937_64& rng) {
  std::vector<std::string> benchmark = cfg.benchmark_order;
  if (benchmark.empty()) {
    for (const TaskSpec& t : dict.tasks) benchmark.push_back(t.id);
  }
  std::bernoulli_distribution coin(0.5);

  Population pop;
  pop.reserve(static_cast<size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) {
    StackOfTasks s;
    if (cfg.phase == Phase::params) {
      for (const std::string& id : benchmark) {
        const TaskSpec& spec = dict.at(id);
        s.entries.push_back({id, uniform_params(spec, rng), coin(rng)});
      }
      ensure_one_active(s, rng);
    } else {
      const std::vector<int> perm = random_permutation(dict.size(), rng);
      for (int idx : perm) {
        const TaskSpec& spec = dict.tasks[static_cast<size_t>(idx)];
        if (cfg.phase == Phase::order_only) {
          s.entries.push_back({spec.id, spec.default_params(), true});
        } else {  // joint
          s.entries.push_back({spec.id, uniform_params(spec, rng), coin(rng)});
        }
      }
      if (cfg.phase == Phase::joint) ensure_one_active(s, rng);
    }
    validate_stack(s, dict);
    pop.push_back(std::move(s));
  }
  return pop;
}

void evaluate_population(Population& pop, const Scenario& scenario,
                         const GpConfig& cfg, int generation) {
  const int episodes = cfg.episodes_per_individual;
  struct Job {
    int individual;
    int episode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].cost) continue;
    for (int e = 0; e < episodes; ++e) {
      // Same seeds for every individual of this generation.
      jobs.push_back({static_cast<int>(i), e,
                      derive_seed(cfg.master_seed,
                                  {kStreamEpisode,
                                   static_cast<std::uint64_t>(generation),
                                   static_cast<std::uint64_t>(e)})});
    }
  }
  if (jobs.empty()) return;

  std::vector<double> episode_costs(jobs.size(), 0.0);
  auto run_job = [&](size_t k) {
    const Job& job = jobs[k];
    episode_costs[k] =
        run_episode(pop[static_cast<size_t>(job.individual)], scenario.world,
                    scenario.model, scenario.dict, scenario.cost,
                    scenario.episode, job.seed)
            .cost;
  };

  const int workers = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (size_t k = 0; k < jobs.size(); ++k) run_job(k);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (size_t k = next.fetch_add(1); k < jobs.size();
             k = next.fetch_add(1)) {
          try {
            run_job(k);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<double> sums(pop.size(), 0.0);
  std::vector<int> counts(pop.size(), 0);
  for (size_t k = 0; k < jobs.size(); ++k) {
    sums[static_cast<size_t>(jobs[k].individual)] += episode_costs[k];
    counts[static_cast<size_t>(jobs[k].individual)] += 1;
  }
  for (size_t i = 0; i < pop.size(); ++i) {
    if (counts[i] > 0) {
      pop[i].cost = sums[i] / counts[i];
      pop[i].eval_generation = generation;
    }
  }
}

Population tournament_select_paired(
    const Population& pop, const std::vector<std::pair<int, int>>& pairs,
    std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Population survivors;
  survivors.reserve(pairs.size());
  for (const auto& [ia, ib] : pairs) {
    const StackOfTasks& a = pop[static_cast<size_t>(ia)];
    const StackOfTasks& b = pop[static_cast<size_t>(ib)];
    if (!a.cost || !b.cost) {
      throw ProtocolError("tournament selection on an unevaluated individual");
    }
    if (*a.cost < *b.cost) {
      survivors.push_back(a);
    } else if (*b.cost < *a.cost) {
      survivors.push_back(b);
    } else {
      survivors.push_back(coin(rng) ? a : b);
    }
  }
  return survivors;
}

Population tournament_select(const Population& pop, std::mt19937_64& rng) {
  if (pop.size() % 2 != 0) {
    throw ProtocolError("tournament selection needs an even population");
  }
  const std::vector<int> idx =
      random_permutation(static_cast<int>(pop.size()), rng);
  std::vector<std::pair<int, int>> pairs;
  for (size_t k = 0; k + 1 < idx.size(); k += 2) {
    pairs.emplace_back(idx[k], idx[k + 1]);
  }
  return tournament_select_paired(pop, pairs, rng);
}

StackOfTasks crossover_at(const StackOfTasks& a, const StackOfTasks& b,
                          int cut) {
  if (a.size() != b.size()) {
    throw ComparisonError("crossover parents differ in size");
  }
  if (cut < 1 || cut > a.size() - 1) {
    throw ProtocolError("crossover cut out of range");
  }
  StackOfTasks child;
  child.entries.assign(a.entries.begin(), a.entries.begin() + cut);
  for (const TaskEntry& e : b.entries) {
    bool taken = false;
    for (const TaskEntry& c : child.entries) {
      if (c.task_id == e.task_id) {
        taken = true;
        break;
      }
    }
    if (!taken) child.entries.push_back(e);
  }
  if (child.size() != a.size()) {
    throw ComparisonError("crossover parents are not over the same dictionary");
  }
  return child;
}

StackOfTasks crossover(const StackOfTasks& a, const StackOfTasks& b,
                       std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cut_dist(1, a.size() - 1);
  return crossover_at(a, b, cut_dist(rng));
}

StackOfTasks mutate(const StackOfTasks& a, const TaskDictionary& dict,
                    const GpConfig& cfg, std::mt19937_64& rng) {
  StackOfTasks child = a;
  child.cost.reset();
  const MutationWeights w = cfg.effective_weights();
  std::discrete_distribution<int> op_dist(
      {w.swap_order, w.perturb_param, w.flip_active});
  const int op = op_dist(rng);

  if (op == 0) {  // swap two positions
    if (child.size() < 2) return child;
    std::uniform_int_distribution<int> pick(0, child.size() - 1);
    const int i = pick(rng);
    int j = pick(rng);
    while (j == i) j = pick(rng);
    std::swap(child.entries[static_cast<size_t>(i)],
              child.entries[static_cast<size_t>(j)]);
  } else if (op == 1) {  // perturb one parameter
    std::vector<std::pair<int, int>> slots;
    for (int e = 0; e < child.size(); ++e) {
      const TaskSpec& spec = dict.at(child.entries[static_cast<size_t>(e)].task_id);
      for (size_t p = 0; p < spec.params.size(); ++p) {
        slots.emplace_back(e, static_cast<int>(p));
      }
    }
    if (!slots.empty() && cfg.param_sigma > 0.0) {
      std::uniform_int_distribution<size_t> pick(0, slots.size() - 1);
      const auto [e, p] = slots[pick(rng)];
      TaskEntry& entry = child.entries[static_cast<size_t>(e)];
      const ParamSpec& ps =
          dict.at(entry.task_id).params[static_cast<size_t>(p)];
      std::normal_distribution<double> noise(
          0.0, cfg.param_sigma * (ps.max - ps.min));
      entry.params[p] = ps.clip(entry.params[p] + noise(rng));
    }
  } else {  // flip one activation flag, keeping at least one task active
    int active_count = 0;
    for (const TaskEntry& e : child.entries) active_count += e.active ? 1 : 0;
    std::vector<int> candidates;
    for (int i = 0; i < child.size(); ++i) {
      const bool active = child.entries[static_cast<size_t>(i)].active;
      if (!active || active_count >= 2) candidates.push_back(i);
    }
    if (!candidates.empty()) {
      std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
      TaskEntry& entry =
          child.entries[static_cast<size_t>(candidates[pick(rng)])];
      entry.active = !entry.active;
    }
  }
  return child;
}

bool check_convergence(const Population& pop, double threshold) {
  for (size_t i = 0; i < pop.size(); ++i) {
    for (size_t j = i + 1; j < pop.size(); ++j) {
      if (sot_distance(pop[i], pop[j]) >= threshold) return false;
    }
  }
  return true;
}

EvolutionResult run_evolution(const Scenario& scenario, const GpConfig& cfg,
                              std::optional<Population> initial) {
  scenario.validate();
  cfg.validate(scenario.dict);

  Population pop;
  if (initial) {
    if (static_cast<int>(initial->size()) != cfg.population_size) {
      throw ConfigError("initial population size differs from population_size");
    }
    for (const StackOfTasks& s : *initial) validate_stack(s, scenario.dict);
    pop = std::move(*initial);
  } else {
    std::mt19937_64 init_rng =
        make_rng(derive_seed(cfg.master_seed, {kStreamInit}));
    pop = init_population(scenario.dict, cfg, init_rng);
  }

  std::vector<GenerationRecord> records;
  std::vector<std::vector<std::vector<std::string>>> orders_per_gen;

  int generation = 0;
  while (true) {
    evaluate_population(pop, scenario, cfg, generation);

    GenerationRecord rec;
    rec.generation = generation;
    size_t best_idx = 0;
    double sum = 0.0;
    for (size_t i = 0; i < pop.size(); ++i) {
      rec.costs.push_back(*pop[i].cost);
      sum += *pop[i].cost;
      if (*pop[i].cost < *pop[best_idx].cost) best_idx = i;
    }
    rec.best = pop[best_idx];
    rec.best_cost = *pop[best_idx].cost;
    rec.mean_cost = sum / static_cast<double>(pop.size());
    double max_dist = 0.0;
    for (size_t i = 0; i < pop.size(); ++i) {
      for (size_t j = i + 1; j < pop.size(); ++j) {
        max_dist = std::max(max_dist, sot_distance(pop[i], pop[j]));
      }
    }
    rec.max_pairwise_dist = max_dist;
    rec.distractor_min_rank = distractor_min_rank_of(rec.best, scenario.dict);
    records.push_back(std::move(rec));

    std::vector<std::vector<std::string>> orders;
    for (const StackOfTasks& s : pop) orders.push_back(s.active_order());
    orders_per_gen.push_back(std::move(orders));

    if (generation >= cfg.max_generations ||
        check_convergence(pop, cfg.convergence_threshold)) {
      break;
    }

    std::mt19937_64 gen_rng = make_rng(derive_seed(
        cfg.master_seed,
        {kStreamGeneration, static_cast<std::uint64_t>(generation)}));
    Population survivors = tournament_select(pop, gen_rng);

    Population next = survivors;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (size_t s = 0; s < survivors.size(); ++s) {
      const bool do_crossover =
          u01(gen_rng) < cfg.crossover_prob && survivors.size() >= 2;
      StackOfTasks child;
      if (do_crossover) {
        std::uniform_int_distribution<size_t> pick(0, survivors.size() - 2);
        size_t partner = pick(gen_rng);
        if (partner >= s) ++partner;  // uniform among the others
        child = crossover(survivors[s], survivors[partner], gen_rng);
      } else {
        child = mutate(survivors[s], scenario.dict, cfg, gen_rng);
      }
      child.cost.reset();
      validate_stack(child, scenario.dict);
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    ++generation;
  }

  size_t best_idx = 0;
  for (size_t i = 0; i < pop.size(); ++i) {
    if (*pop[i].cost < *pop[best_idx].cost) best_idx = i;
  }
  EvolutionResult result{pop[best_idx], std::move(records)};

  const std::vector<std::string> final_order = result.best.active_order();
  for (size_t g = 0; g < result.records.size(); ++g) {
    int match = 0;
    for (const auto& order : orders_per_gen[g]) {
      if (order == final_order) ++match;
    }
    result.records[g].order_match_pct =
        100.0 * match / static_cast<double>(orders_per_gen[g].size());
  }
  return result;
}

std::string generations_csv(const std::vector<GenerationRecord>& records) {
  std::string out =
      "gen,best_cost,mean_cost,order_match_pct,max_pairwise_dist,"
      "distractor_min_rank\n";
  char buf[64];
  for (const GenerationRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.generation, r.best_cost, r.mean_cost, r.order_match_pct,
                  r.max_pairwise_dist, r.distractor_min_rank);
    out += buf;
  }
  return out;
}

}  // namespace sotevo
