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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ponas/accuracy_table.hpp"
#include "ponas/search_space.hpp"

namespace ponas {

/// Stand-in for supernet validation: maps an architecture to an accuracy
/// in [0,1]. Implementations must return equal values for equal specs and
/// tolerate concurrent calls.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual double evaluate(const ArchitectureSpec& spec) const = 0;
};

/// Seeded evaluator whose accuracy is a base value plus one additive
/// utility per (layer, block), plus bounded noise keyed on the gene vector.
/// Larger kernels, wider expansion and SE tend to score higher; how much a
/// layer cares varies per layer.
class SyntheticEvaluator final : public Evaluator {
 public:
  SyntheticEvaluator(std::uint64_t seed, int layers, int candidates = kNumCandidates,
                     double noise = 0.001);
  SyntheticEvaluator(std::uint64_t seed, const MacroArchitecture& macro, double noise = 0.001)
      : SyntheticEvaluator(seed, macro.num_searchable(), macro.num_candidates(), noise) {}

  double evaluate(const ArchitectureSpec& spec) const override;
  /// Same model addressed by genes directly.
  double evaluate_genes(const Chromosome& genes) const;

  double utility(int layer, int candidate) const {
    return utilities_[static_cast<std::size_t>(layer * candidates_ + candidate)];
  }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  int layers_;
  int candidates_;
  double noise_;
  double base_;
  std::vector<double> utilities_;
};

/// Training hyperparameters of the meta and fine-tuning stages. Carried as
/// run metadata only.
struct TwoStageSchedule {
  int meta_epochs = 50;
  int finetune_epochs_per_layer = 3;
  double meta_lr = 0.1;
  double finetune_lr = 0.001;
  std::vector<int> lr_decay_epochs = {20, 40};
  int batch_size = 256;

  /// Throws UsageError unless every field is positive.
  void validate() const;
};

nlohmann::json to_json(const TwoStageSchedule& schedule);

struct BuildOptions {
  /// Worker threads for the evaluations of one layer; 0 picks the hardware
  /// concurrency.
  unsigned threads = 1;
  /// Called after each layer with the rows filled so far (layers 0..layer).
  std::function<void(int layer, std::span<const double> filled)> on_layer;
};

struct BuildResult {
  AccuracyTable table;
  Chromosome best_genes;
  int evaluations = 0;
};

/// Fills the accuracy table layer by layer. Row l is evaluated with the
/// best blocks found for earlier layers, candidate i at layer l and the
/// largest block everywhere after. Exactly L * I evaluator calls. Throws
/// ValidationError naming (layer, candidate) when the evaluator leaves
/// [0,1].
BuildResult build_table(const MacroArchitecture& macro, const Evaluator& evaluator,
                        const BuildOptions& options = {});

/// Round-based schedule in which every candidate is trained exactly once
/// per round.
struct FairnessSchedule {
  std::vector<std::vector<int>> rounds;
};

FairnessSchedule fairness_schedule(std::uint64_t seed, int candidates, int rounds);

struct DimRange {
  int offset = 0;
  int length = 0;
  friend bool operator==(const DimRange&, const DimRange&) = default;
};

/// How one parameter tensor of the largest block is cut down for a
/// smaller block. A dropped tensor has no counterpart in the target.
struct TensorCrop {
  std::string name;
  std::vector<int> source_shape;
  std::vector<DimRange> ranges;
  bool dropped = false;

  std::vector<int> target_shape() const;
  std::int64_t source_count() const;
  std::int64_t target_count() const;
};

struct TensorShapeCrop {
  CandidateBlock target;
  std::vector<TensorCrop> tensors;

  std::int64_t source_parameter_count() const;
  std::int64_t target_parameter_count() const;
};

/// Weight-sharing crop from the largest block to `target` at `slot`:
/// leading channels of the expanded width, centred kernel window, SE
/// tensors dropped when the target has no SE. Normalization tensors are
/// listed only when `include_norm` is set.
TensorShapeCrop crop_plan(const CandidateBlock& target, const LayerSlot& slot,
                          bool include_norm = false);

}  // namespace ponas
