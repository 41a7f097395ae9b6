// Copyright 2026 The ponas Authors
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
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ponas/accuracy_table.hpp"
#include "ponas/cost_model.hpp"
#include "ponas/search_space.hpp"

namespace ponas {

enum class SelectionMode {
  /// Parents for the next generation are the best half of parents plus
  /// children.
  kPooled,
  /// Generational: the next parents come from the newly produced children
  /// only; the retained parents ride along for one generation.
  kParentsOnly,
};

std::string_view to_string(SelectionMode mode);
SelectionMode parse_selection_mode(std::string_view name);

struct GAConfig {
  int population = 20;
  int parents_kept = 10;
  int generations = 1000;
  double mutation_prob = 0.1;
  std::uint64_t seed = 42;
  int repair_attempts = 100;
  SelectionMode selection = SelectionMode::kPooled;
  /// Draws allowed when sampling the feasible initial population.
  int init_draws = 10000;

  /// Throws UsageError: population even and >= 4, parents_kept equal to
  /// half of it, mutation_prob in [0,1], non-negative generations.
  void validate() const;
};

struct GenerationRecord {
  int generation = 0;
  /// Best loss seen so far in the run.
  double best_loss = 0.0;
  /// Mean loss of the current population.
  double mean_loss = 0.0;
  Chromosome best_genes;
};

struct EvolutionLog {
  std::vector<GenerationRecord> records;
  Chromosome best;
  double best_loss = 0.0;
  std::int64_t best_cost = 0;  // in the constrained metric
  std::optional<CostReport> best_report;  // set when a macro is known
};

struct SpecializationResult {
  Chromosome genes;
  double loss = 0.0;
  EvolutionLog log;
};

/// Called with every population the search forms: the initial one as
/// generation 0, then each next generation.
using PopulationObserver = std::function<void(int generation, std::span<const Chromosome>)>;

/// Sum over layers of loss[l, genes[l]]. Throws UsageError when the genes
/// do not fit the table.
double chromosome_loss(const Chromosome& genes, const AccuracyLossTable& loss);

/// Genetic search for the lowest-loss chromosome whose cost stays within
/// `ceiling`. Deterministic for a given cfg.seed. Throws InfeasibleError
/// when even the cheapest chromosome exceeds the ceiling, ValidationError
/// when the table and cost shapes disagree.
SpecializationResult specialize(const AccuracyLossTable& loss, const LayerCostTable& costs,
                                std::int64_t ceiling, const GAConfig& cfg,
                                const PopulationObserver& observer = {});

SpecializationResult specialize(const AccuracyLossTable& loss, const Constraint& constraint,
                                const MacroArchitecture& macro, const GAConfig& cfg,
                                const PopulationObserver& observer = {});

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Exhaustive search, lexicographically first among equal losses. Throws
/// UsageError when I^L exceeds kBruteForceLimit, InfeasibleError when no
/// chromosome fits.
Chromosome brute_force(const AccuracyLossTable& loss, const LayerCostTable& costs,
                       std::int64_t ceiling);
Chromosome brute_force(const AccuracyLossTable& loss, const Constraint& constraint,
                       const MacroArchitecture& macro);

/// Per-layer block with the largest loss.
Chromosome worst_network(const AccuracyLossTable& loss);

/// Replaces the gene at `layer` with that layer's best block.
Chromosome improve_at(const Chromosome& genes, int layer, const AccuracyLossTable& loss);

struct AblationNetworks {
  Chromosome worst;
  Chromosome worst_plus_least;
  Chromosome worst_plus_most;
  int least_important_layer = 0;
  int most_important_layer = 0;
};

/// Worst network and its two single-layer improvements at the least and
/// most important layers (first index on ties).
AblationNetworks ablation_networks(const AccuracyLossTable& loss);

}  // namespace ponas
