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

#include "ponas/specializer.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ponas/error.hpp"
#include "ponas/rng.hpp"

namespace ponas {
namespace {

struct Individual {
  Chromosome genes;
  double loss;
};

bool ranks_before(const Individual& a, const Individual& b) {
  if (a.loss != b.loss) return a.loss < b.loss;
  return a.genes < b.genes;
}

void check_shapes(const AccuracyLossTable& loss, const LayerCostTable& costs) {
  if (loss.layers() != costs.layers() || loss.candidates() != costs.candidates()) {
    throw ValidationError("dimension mismatch: loss table is " + std::to_string(loss.layers()) +
                          "x" + std::to_string(loss.candidates()) + ", cost table is " +
                          std::to_string(costs.layers()) + "x" +
                          std::to_string(costs.candidates()));
  }
}

void check_feasible(const LayerCostTable& costs, std::int64_t ceiling) {
  const std::int64_t cheapest = costs.cheapest_cost();
  if (cheapest > ceiling) {
    throw InfeasibleError("no architecture fits the ceiling " + std::to_string(ceiling) +
                              "; the cheapest costs " + std::to_string(cheapest),
                          cheapest);
  }
}

// Single-stream GA state; every random draw goes through `rng` in program
// order so a seed fixes the whole run.
class GeneticSearch {
 public:
  GeneticSearch(const AccuracyLossTable& loss, const LayerCostTable& costs, std::int64_t ceiling,
                const GAConfig& cfg)
      : loss_(loss), costs_(costs), ceiling_(ceiling), cfg_(cfg), rng_(cfg.seed),
        layers_(loss.layers()), candidates_(loss.candidates()) {}

  SpecializationResult run(const PopulationObserver& observer) {
    std::vector<Individual> population = initial_population();
    notify(observer, 0, population);
    for (const auto& ind : population) consider(ind);

    std::vector<Individual> selectable = population;
    for (int gen = 1; gen <= cfg_.generations; ++gen) {
      std::sort(selectable.begin(), selectable.end(), ranks_before);
      std::vector<Individual> parents(selectable.begin(),
                                      selectable.begin() + cfg_.parents_kept);
      std::vector<Individual> children = reproduce(parents);

      population = parents;
      population.insert(population.end(), children.begin(), children.end());
      selectable = cfg_.selection == SelectionMode::kPooled ? population : children;

      notify(observer, gen, population);
      for (const auto& ind : children) consider(ind);

      double total = 0.0;
      for (const auto& ind : population) total += ind.loss;
      log_.records.push_back({gen, best_.loss, total / static_cast<double>(population.size()),
                              best_.genes});
    }

    log_.best = best_.genes;
    log_.best_loss = best_.loss;
    log_.best_cost = costs_.cost(best_.genes);
    return {best_.genes, best_.loss, std::move(log_)};
  }

 private:
  Individual make(Chromosome genes) const {
    const double l = chromosome_loss(genes, loss_);
    return {std::move(genes), l};
  }

  bool feasible(const Chromosome& genes) const { return costs_.cost(genes) <= ceiling_; }

  void consider(const Individual& ind) {
    if (!has_best_ || ranks_before(ind, best_)) {
      best_ = ind;
      has_best_ = true;
    }
  }

  static void notify(const PopulationObserver& observer, int gen,
                     const std::vector<Individual>& population) {
    if (!observer) return;
    std::vector<Chromosome> genes;
    genes.reserve(population.size());
    for (const auto& ind : population) genes.push_back(ind.genes);
    observer(gen, genes);
  }

  Chromosome random_chromosome() {
    std::vector<int> genes(static_cast<std::size_t>(layers_));
    for (auto& g : genes) g = static_cast<int>(rng_.below(static_cast<std::uint64_t>(candidates_)));
    return Chromosome(std::move(genes));
  }

  // Zero-loss chromosome downgraded to the cheapest block layer by layer,
  // least important layers first, until it fits.
  Chromosome downgraded_startpoint() const {
    std::vector<int> genes;
    for (int l = 0; l < layers_; ++l) genes.push_back(row_best(loss_, l));
    Chromosome c(std::move(genes));
    const auto importance = layer_importance(loss_);
    std::vector<int> order(static_cast<std::size_t>(layers_));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return importance[static_cast<std::size_t>(a)] < importance[static_cast<std::size_t>(b)];
    });
    const Chromosome cheapest = costs_.cheapest();
    for (int l : order) {
      if (feasible(c)) break;
      c[static_cast<std::size_t>(l)] = cheapest[static_cast<std::size_t>(l)];
    }
    return c;
  }

  std::vector<Individual> initial_population() {
    std::vector<Individual> population;
    for (int draw = 0; draw < cfg_.init_draws &&
                       static_cast<int>(population.size()) < cfg_.population;
         ++draw) {
      Chromosome c = random_chromosome();
      if (feasible(c)) population.push_back(make(std::move(c)));
    }
    if (static_cast<int>(population.size()) < cfg_.population) {
      const Individual fallback = make(downgraded_startpoint());
      population.resize(static_cast<std::size_t>(cfg_.population), fallback);
    }
    return population;
  }

  Chromosome splice(const Chromosome& head, const Chromosome& tail, int cut) const {
    Chromosome child = head;
    for (int l = cut; l < layers_; ++l)
      child[static_cast<std::size_t>(l)] = tail[static_cast<std::size_t>(l)];
    return child;
  }

  Chromosome mutate(const Chromosome& genes) {
    Chromosome out = genes;
    if (candidates_ < 2) return out;
    for (int l = 0; l < layers_; ++l) {
      if (!rng_.bernoulli(cfg_.mutation_prob)) continue;
      auto& g = out[static_cast<std::size_t>(l)];
      // Uniform over the other candidates.
      const int pick = static_cast<int>(rng_.below(static_cast<std::uint64_t>(candidates_ - 1)));
      g = pick >= g ? pick + 1 : pick;
    }
    return out;
  }

  std::vector<Individual> reproduce(const std::vector<Individual>& parents) {
    std::vector<Individual> children;
    for (std::size_t p = 0; p + 1 < parents.size(); p += 2) {
      const Chromosome& a = parents[p].genes;
      const Chromosome& b = parents[p + 1].genes;

      std::optional<Chromosome> first, second;
      if (layers_ >= 2) {
        for (int attempt = 0; attempt < cfg_.repair_attempts && !(first && second); ++attempt) {
          const int cut = rng_.between(1, layers_ - 1);
          if (!first) {
            Chromosome c = splice(a, b, cut);
            if (feasible(c)) first = std::move(c);
          }
          if (!second) {
            Chromosome c = splice(b, a, cut);
            if (feasible(c)) second = std::move(c);
          }
        }
      }
      // Failed repair falls back to cloning the parent that heads the child.
      if (!first) first = a;
      if (!second) second = b;

      for (Chromosome* child : {&*first, &*second}) {
        for (int attempt = 0; attempt < cfg_.repair_attempts; ++attempt) {
          Chromosome m = mutate(*child);
          if (feasible(m)) {
            *child = std::move(m);
            break;
          }
        }
        children.push_back(make(std::move(*child)));
      }
    }
    return children;
  }

  const AccuracyLossTable& loss_;
  const LayerCostTable& costs_;
  std::int64_t ceiling_;
  const GAConfig& cfg_;
  Rng rng_;
  int layers_;
  int candidates_;
  Individual best_{};
  bool has_best_ = false;
  EvolutionLog log_;
};

}  // namespace

std::string_view to_string(SelectionMode mode) {
  return mode == SelectionMode::kPooled ? "pooled" : "parents_only";
}

SelectionMode parse_selection_mode(std::string_view name) {
  if (name == "pooled") return SelectionMode::kPooled;
  if (name == "parents_only") return SelectionMode::kParentsOnly;
  throw UsageError("unknown selection mode '" + std::string(name) +
                   "' (expected pooled or parents_only)");
}

void GAConfig::validate() const {
  if (population < 4 || population % 2 != 0) {
    throw UsageError("population must be even and at least 4, got " + std::to_string(population));
  }
  if (parents_kept != population / 2) {
    throw UsageError("parents_kept must be half the population (" +
                     std::to_string(population / 2) + "), got " + std::to_string(parents_kept));
  }
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
    throw UsageError("mutation probability must lie in [0, 1]");
  }
  if (generations < 0) throw UsageError("generations must be non-negative");
  if (repair_attempts < 1) throw UsageError("repair_attempts must be at least 1");
  if (init_draws < 0) throw UsageError("init_draws must be non-negative");
}

double chromosome_loss(const Chromosome& genes, const AccuracyLossTable& loss) {
  genes.validate(loss.layers(), loss.candidates());
  double total = 0.0;
  for (int l = 0; l < loss.layers(); ++l) total += loss.at(l, genes[static_cast<std::size_t>(l)]);
  return total;
}

SpecializationResult specialize(const AccuracyLossTable& loss, const LayerCostTable& costs,
                                std::int64_t ceiling, const GAConfig& cfg,
                                const PopulationObserver& observer) {
  cfg.validate();
  check_shapes(loss, costs);
  check_feasible(costs, ceiling);
  return GeneticSearch(loss, costs, ceiling, cfg).run(observer);
}

SpecializationResult specialize(const AccuracyLossTable& loss, const Constraint& constraint,
                                const MacroArchitecture& macro, const GAConfig& cfg,
                                const PopulationObserver& observer) {
  const auto costs = LayerCostTable::from_macro(macro, constraint.metric());
  auto result = specialize(loss, costs, constraint.ceiling(), cfg, observer);
  result.log.best_report = architecture_cost(decode(result.genes, macro));
  return result;
}

Chromosome brute_force(const AccuracyLossTable& loss, const LayerCostTable& costs,
                       std::int64_t ceiling) {
  check_shapes(loss, costs);
  const int layers = loss.layers();
  const auto candidates = static_cast<std::uint64_t>(loss.candidates());
  std::uint64_t space = 1;
  for (int l = 0; l < layers; ++l) {
    if (space > kBruteForceLimit / candidates) {
      throw UsageError("search space too large for exhaustive search (" +
                       std::to_string(loss.candidates()) + "^" + std::to_string(layers) +
                       " > " + std::to_string(kBruteForceLimit) + ")");
    }
    space *= candidates;
  }
  check_feasible(costs, ceiling);

  Chromosome current = Chromosome::uniform(layers, 0);
  std::optional<Chromosome> best;
  double best_loss = 0.0;
  for (std::uint64_t n = 0; n < space; ++n) {
    if (costs.cost(current) <= ceiling) {
      const double l = chromosome_loss(current, loss);
      if (!best || l < best_loss) {
        best = current;
        best_loss = l;
      }
    }
    // Odometer increment, last layer fastest: lexicographic order.
    for (int l = layers - 1; l >= 0; --l) {
      auto& g = current[static_cast<std::size_t>(l)];
      if (++g < loss.candidates()) break;
      g = 0;
    }
  }
  return *best;
}

Chromosome brute_force(const AccuracyLossTable& loss, const Constraint& constraint,
                       const MacroArchitecture& macro) {
  return brute_force(loss, LayerCostTable::from_macro(macro, constraint.metric()),
                     constraint.ceiling());
}

Chromosome worst_network(const AccuracyLossTable& loss) {
  std::vector<int> genes;
  for (int l = 0; l < loss.layers(); ++l) genes.push_back(row_worst(loss, l));
  return Chromosome(std::move(genes));
}

Chromosome improve_at(const Chromosome& genes, int layer, const AccuracyLossTable& loss) {
  genes.validate(loss.layers(), loss.candidates());
  const int best = row_best(loss, layer);  // range-checks the layer
  Chromosome out = genes;
  out[static_cast<std::size_t>(layer)] = best;
  return out;
}

AblationNetworks ablation_networks(const AccuracyLossTable& loss) {
  const auto importance = layer_importance(loss);
  const auto most = std::max_element(importance.begin(), importance.end()) - importance.begin();
  const auto least = std::min_element(importance.begin(), importance.end()) - importance.begin();
  AblationNetworks out;
  out.worst = worst_network(loss);
  out.least_important_layer = static_cast<int>(least);
  out.most_important_layer = static_cast<int>(most);
  out.worst_plus_least = improve_at(out.worst, out.least_important_layer, loss);
  out.worst_plus_most = improve_at(out.worst, out.most_important_layer, loss);
  return out;
}

}  // namespace ponas
