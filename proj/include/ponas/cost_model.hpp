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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ponas/search_space.hpp"

namespace ponas {

/// Multiply-accumulate count and parameter count. Integer throughout so
/// sums are reproducible bit for bit.
struct CostReport {
  std::int64_t flops = 0;
  std::int64_t params = 0;

  CostReport& operator+=(const CostReport& o) {
    flops += o.flops;
    params += o.params;
    return *this;
  }
  friend CostReport operator+(CostReport a, const CostReport& b) { return a += b; }
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

enum class CostMetric { kFlops, kParams };

std::string_view to_string(CostMetric metric);
/// Accepts "flops" or "params"; throws UsageError otherwise.
CostMetric parse_cost_metric(std::string_view name);

inline std::int64_t select(const CostReport& report, CostMetric metric) {
  return metric == CostMetric::kFlops ? report.flops : report.params;
}

class Constraint {
 public:
  /// Throws UsageError unless ceiling > 0.
  Constraint(CostMetric metric, std::int64_t ceiling);

  CostMetric metric() const { return metric_; }
  std::int64_t ceiling() const { return ceiling_; }

 private:
  CostMetric metric_;
  std::int64_t ceiling_;
};

// MBConv: optional 1x1 expand, kxk depthwise, optional squeeze-excite with
// reduction 4 on the expanded width, 1x1 project. Every convolution is
// followed by a 2-parameter-per-channel normalization.
CostReport mbconv_cost(int kernel, int expansion, bool se, const LayerSlot& slot);

/// Throws UsageError for non-positive slot shapes.
CostReport block_cost(const CandidateBlock& block, const LayerSlot& slot);

/// Cost of a non-searchable slot (stem, E1 block, head, pool, classifier).
CostReport fixed_slot_cost(const LayerSlot& slot);

CostReport slot_cost(const ResolvedSlot& slot);

CostReport architecture_cost(const ArchitectureSpec& spec);

bool satisfies(const ArchitectureSpec& spec, const Constraint& constraint);

/// `{"flops", "params", "flops_m", "params_m"}` with the *_m fields in
/// millions rounded to two decimals.
nlohmann::json to_json(const CostReport& report);

/// Additive cost decomposition for one metric: a constant base for the
/// fixed slots plus one entry per (layer, candidate). Lets the search
/// score a chromosome with L lookups.
class LayerCostTable {
 public:
  /// Throws ValidationError on ragged rows, empty tables or negative costs.
  LayerCostTable(std::int64_t base, std::vector<std::vector<std::int64_t>> costs);

  static LayerCostTable from_macro(const MacroArchitecture& macro, CostMetric metric);

  int layers() const { return static_cast<int>(costs_.size()); }
  int candidates() const { return static_cast<int>(costs_.front().size()); }
  std::int64_t base() const { return base_; }
  std::int64_t at(int layer, int candidate) const {
    return costs_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(candidate)];
  }

  /// Base plus the chosen per-layer costs. Genes must be in range.
  std::int64_t cost(const Chromosome& genes) const;

  /// Per-layer cheapest candidate (lowest index on ties) and its total.
  Chromosome cheapest() const;
  std::int64_t cheapest_cost() const { return cost(cheapest()); }

 private:
  std::int64_t base_;
  std::vector<std::vector<std::int64_t>> costs_;
};

}  // namespace ponas
