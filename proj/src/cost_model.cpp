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

#include "ponas/cost_model.hpp"

#include <cmath>
#include <string>

#include "ponas/error.hpp"

namespace ponas {
namespace {

constexpr std::int64_t kNormParamsPerChannel = 2;
constexpr std::int64_t kSeReduction = 4;

void check_shape(const LayerSlot& slot) {
  if (slot.input_resolution <= 0 || slot.in_channels <= 0 || slot.out_channels <= 0 ||
      slot.stride <= 0) {
    throw UsageError("slot shape must be positive (resolution " +
                     std::to_string(slot.input_resolution) + ", channels " +
                     std::to_string(slot.in_channels) + "->" +
                     std::to_string(slot.out_channels) + ", stride " +
                     std::to_string(slot.stride) + ")");
  }
}

// Dense kxk convolution producing an out_side x out_side map, with norm.
CostReport conv_cost(std::int64_t out_side, std::int64_t cin, std::int64_t cout,
                     std::int64_t kernel) {
  const std::int64_t weights = cin * cout * kernel * kernel;
  return {out_side * out_side * weights, weights + kNormParamsPerChannel * cout};
}

}  // namespace

std::string_view to_string(CostMetric metric) {
  return metric == CostMetric::kFlops ? "flops" : "params";
}

CostMetric parse_cost_metric(std::string_view name) {
  if (name == "flops") return CostMetric::kFlops;
  if (name == "params") return CostMetric::kParams;
  throw UsageError("unknown cost metric '" + std::string(name) +
                   "' (expected flops or params)");
}

Constraint::Constraint(CostMetric metric, std::int64_t ceiling)
    : metric_(metric), ceiling_(ceiling) {
  if (ceiling <= 0) {
    throw UsageError("cost ceiling must be positive, got " + std::to_string(ceiling));
  }
}

CostReport mbconv_cost(int kernel, int expansion, bool se, const LayerSlot& slot) {
  check_shape(slot);
  if (kernel <= 0 || expansion <= 0) throw UsageError("kernel and expansion must be positive");
  const std::int64_t h = slot.input_resolution;
  const std::int64_t h_out = h / slot.stride;
  const std::int64_t cin = slot.in_channels;
  const std::int64_t cout = slot.out_channels;
  const std::int64_t cexp = cin * expansion;
  const std::int64_t k2 = static_cast<std::int64_t>(kernel) * kernel;

  CostReport r;
  if (expansion != 1) {
    r.flops += h * h * cin * cexp;
    r.params += cin * cexp + kNormParamsPerChannel * cexp;
  }
  r.flops += h_out * h_out * cexp * k2;
  r.params += cexp * k2 + kNormParamsPerChannel * cexp;
  if (se) {
    const std::int64_t reduced = (cexp + kSeReduction - 1) / kSeReduction;
    r.flops += 2 * cexp * reduced;
    r.params += 2 * cexp * reduced + reduced + cexp;
  }
  r.flops += h_out * h_out * cexp * cout;
  r.params += cexp * cout + kNormParamsPerChannel * cout;
  return r;
}

CostReport block_cost(const CandidateBlock& block, const LayerSlot& slot) {
  return mbconv_cost(block.kernel, block.expansion, block.se, slot);
}

CostReport fixed_slot_cost(const LayerSlot& slot) {
  check_shape(slot);
  if (!slot.fixed_block) throw UsageError("slot is searchable; it has no fixed block");
  switch (*slot.fixed_block) {
    case FixedBlock::kStemConv3x3:
      return conv_cost(slot.output_resolution(), slot.in_channels, slot.out_channels, 3);
    case FixedBlock::kMBConvE1_3x3:
      return mbconv_cost(3, 1, false, slot);
    case FixedBlock::kHeadConv1x1:
      return conv_cost(slot.output_resolution(), slot.in_channels, slot.out_channels, 1);
    case FixedBlock::kAvgPool7x7:
      return {};
    case FixedBlock::kFullyConnected: {
      const std::int64_t w = static_cast<std::int64_t>(slot.in_channels) * slot.out_channels;
      return {w, w + slot.out_channels};
    }
  }
  return {};
}

CostReport slot_cost(const ResolvedSlot& slot) {
  return slot.candidate ? block_cost(*slot.candidate, slot.slot) : fixed_slot_cost(slot.slot);
}

CostReport architecture_cost(const ArchitectureSpec& spec) {
  CostReport total;
  for (const auto& s : spec.slots()) total += slot_cost(s);
  return total;
}

bool satisfies(const ArchitectureSpec& spec, const Constraint& constraint) {
  return select(architecture_cost(spec), constraint.metric()) <= constraint.ceiling();
}

nlohmann::json to_json(const CostReport& report) {
  auto millions = [](std::int64_t v) {
    return std::round(static_cast<double>(v) / 1e4) / 100.0;
  };
  return {{"flops", report.flops},
          {"params", report.params},
          {"flops_m", millions(report.flops)},
          {"params_m", millions(report.params)}};
}

LayerCostTable::LayerCostTable(std::int64_t base,
                               std::vector<std::vector<std::int64_t>> costs)
    : base_(base), costs_(std::move(costs)) {
  if (costs_.empty() || costs_.front().empty()) {
    throw ValidationError("cost table needs at least one layer and one candidate");
  }
  if (base_ < 0) throw ValidationError("cost table base must be non-negative");
  for (std::size_t l = 0; l < costs_.size(); ++l) {
    if (costs_[l].size() != costs_.front().size()) {
      throw ValidationError("cost table row " + std::to_string(l) + " has " +
                            std::to_string(costs_[l].size()) + " entries, expected " +
                            std::to_string(costs_.front().size()));
    }
    for (auto c : costs_[l])
      if (c < 0) throw ValidationError("cost table entries must be non-negative");
  }
}

LayerCostTable LayerCostTable::from_macro(const MacroArchitecture& macro, CostMetric metric) {
  std::int64_t base = 0;
  std::vector<std::vector<std::int64_t>> costs;
  const auto blocks = enumerate_candidate_blocks();
  for (const auto& slot : macro.slots()) {
    if (!slot.searchable()) {
      base += select(fixed_slot_cost(slot), metric);
      continue;
    }
    auto& row = costs.emplace_back();
    for (const auto& b : blocks) row.push_back(select(block_cost(b, slot), metric));
  }
  return LayerCostTable(base, std::move(costs));
}

std::int64_t LayerCostTable::cost(const Chromosome& genes) const {
  std::int64_t total = base_;
  for (int l = 0; l < genes.size(); ++l) total += at(l, genes[static_cast<std::size_t>(l)]);
  return total;
}

Chromosome LayerCostTable::cheapest() const {
  std::vector<int> genes;
  for (const auto& row : costs_) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
      if (row[i] < row[best]) best = i;
    genes.push_back(static_cast<int>(best));
  }
  return Chromosome(std::move(genes));
}

}  // namespace ponas
