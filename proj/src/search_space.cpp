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

#include "ponas/search_space.hpp"

#include <sstream>

#include "ponas/error.hpp"

namespace ponas {
namespace {

constexpr std::array<int, 3> kKernels = {3, 5, 7};
constexpr std::array<int, 2> kExpansions = {3, 6};

struct SearchableRow {
  int resolution;
  int in_channels;
  int out_channels;
  int repeat;
  int stride;
};

// Body rows of the macro table; the first repeat of each row applies the
// stride and the channel change.
constexpr std::array<SearchableRow, 9> kBodyRows = {{
    {112, 16, 32, 1, 2},
    {56, 32, 32, 1, 1},
    {56, 32, 40, 1, 2},
    {28, 40, 40, 3, 1},
    {28, 40, 80, 1, 2},
    {14, 80, 96, 4, 1},
    {14, 96, 96, 3, 1},
    {14, 96, 192, 1, 2},
    {7, 192, 320, 4, 1},
}};

MacroArchitecture make_default_macro() {
  std::vector<LayerSlot> slots;
  slots.push_back({224, 3, 32, 2, FixedBlock::kStemConv3x3});
  slots.push_back({112, 32, 16, 1, FixedBlock::kMBConvE1_3x3});
  for (const auto& row : kBodyRows) {
    int resolution = row.resolution;
    int in_channels = row.in_channels;
    for (int r = 0; r < row.repeat; ++r) {
      const int stride = r == 0 ? row.stride : 1;
      slots.push_back({resolution, in_channels, row.out_channels, stride, std::nullopt});
      resolution /= stride;
      in_channels = row.out_channels;
    }
  }
  slots.push_back({7, 320, 1280, 1, FixedBlock::kHeadConv1x1});
  slots.push_back({7, 1280, 1280, 1, FixedBlock::kAvgPool7x7});
  slots.push_back({1, 1280, 1000, 1, FixedBlock::kFullyConnected});
  return MacroArchitecture(std::string(kMacroName), std::move(slots));
}

}  // namespace

CandidateBlock CandidateBlock::from_index(int index) {
  if (index < 0 || index >= kNumCandidates) {
    throw UsageError("candidate block index " + std::to_string(index) +
                     " outside [0, " + std::to_string(kNumCandidates) + ")");
  }
  return {kKernels[static_cast<std::size_t>(index / 4)],
          kExpansions[static_cast<std::size_t>((index / 2) % 2)], index % 2 == 1};
}

int CandidateBlock::index() const {
  int kernel_rank = -1;
  for (std::size_t i = 0; i < kKernels.size(); ++i)
    if (kKernels[i] == kernel) kernel_rank = static_cast<int>(i);
  int expansion_rank = -1;
  for (std::size_t i = 0; i < kExpansions.size(); ++i)
    if (kExpansions[i] == expansion) expansion_rank = static_cast<int>(i);
  if (kernel_rank < 0 || expansion_rank < 0) {
    throw UsageError("not a candidate block: " + to_string(*this));
  }
  return kernel_rank * 4 + expansion_rank * 2 + (se ? 1 : 0);
}

std::array<CandidateBlock, kNumCandidates> enumerate_candidate_blocks() {
  std::array<CandidateBlock, kNumCandidates> blocks;
  for (int i = 0; i < kNumCandidates; ++i)
    blocks[static_cast<std::size_t>(i)] = CandidateBlock::from_index(i);
  return blocks;
}

std::string to_string(const CandidateBlock& block) {
  std::ostringstream os;
  os << "MBConv(k" << block.kernel << ",e" << block.expansion << (block.se ? ",se)" : ")");
  return os.str();
}

std::string_view to_string(FixedBlock block) {
  switch (block) {
    case FixedBlock::kStemConv3x3: return "conv3x3";
    case FixedBlock::kMBConvE1_3x3: return "mbconv_e1_3x3";
    case FixedBlock::kHeadConv1x1: return "conv1x1";
    case FixedBlock::kAvgPool7x7: return "avgpool7x7";
    case FixedBlock::kFullyConnected: return "fc";
  }
  return "unknown";
}

int LayerSlot::output_resolution() const {
  if (fixed_block == FixedBlock::kAvgPool7x7) return 1;
  return input_resolution / stride;
}

bool LayerSlot::has_residual() const {
  const bool mbconv = searchable() || fixed_block == FixedBlock::kMBConvE1_3x3;
  return mbconv && stride == 1 && in_channels == out_channels;
}

MacroArchitecture::MacroArchitecture(std::string name, std::vector<LayerSlot> slots)
    : name_(std::move(name)), slots_(std::move(slots)) {
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    const LayerSlot& s = slots_[j];
    if (s.input_resolution <= 0 || s.in_channels <= 0 || s.out_channels <= 0 ||
        (s.stride != 1 && s.stride != 2)) {
      throw ValidationError("slot " + std::to_string(j) + " has an invalid shape");
    }
    if (s.stride == 2 && s.input_resolution % 2 != 0) {
      throw ValidationError("slot " + std::to_string(j) + " halves an odd resolution");
    }
    if (j > 0) {
      const LayerSlot& prev = slots_[j - 1];
      if (s.in_channels != prev.out_channels ||
          s.input_resolution != prev.output_resolution()) {
        throw ValidationError("slot " + std::to_string(j) +
                              " does not chain onto the previous slot");
      }
    }
    if (s.searchable()) searchable_.push_back(j);
  }
}

std::size_t MacroArchitecture::searchable_slot_index(int layer) const {
  if (layer < 0 || layer >= num_searchable()) {
    throw UsageError("layer " + std::to_string(layer) + " outside [0, " +
                     std::to_string(num_searchable()) + ")");
  }
  return searchable_[static_cast<std::size_t>(layer)];
}

const MacroArchitecture& default_macro() {
  static const MacroArchitecture macro = make_default_macro();
  return macro;
}

void Chromosome::validate(int num_layers, int num_candidates) const {
  if (size() != num_layers) {
    throw UsageError("chromosome has " + std::to_string(size()) + " genes, expected " +
                     std::to_string(num_layers));
  }
  for (int l = 0; l < size(); ++l) {
    const int g = genes_[static_cast<std::size_t>(l)];
    if (g < 0 || g >= num_candidates) {
      throw UsageError("gene " + std::to_string(g) + " at layer " + std::to_string(l) +
                       " outside [0, " + std::to_string(num_candidates) + ")");
    }
  }
}

std::string to_string(const Chromosome& chromosome) {
  std::string out;
  for (int g : chromosome.genes()) {
    if (!out.empty()) out += ',';
    out += std::to_string(g);
  }
  return out;
}

Chromosome ArchitectureSpec::genes() const {
  std::vector<int> genes;
  for (const auto& s : slots_)
    if (s.candidate) genes.push_back(s.candidate->index());
  return Chromosome(std::move(genes));
}

ArchitectureSpec decode(const Chromosome& chromosome, const MacroArchitecture& macro) {
  chromosome.validate(macro.num_searchable(), macro.num_candidates());
  std::vector<ResolvedSlot> out;
  out.reserve(macro.slots().size());
  std::size_t layer = 0;
  for (const auto& slot : macro.slots()) {
    if (slot.searchable()) {
      out.push_back({slot, CandidateBlock::from_index(chromosome[layer++])});
    } else {
      out.push_back({slot, std::nullopt});
    }
  }
  return ArchitectureSpec(macro.name(), std::move(out));
}

nlohmann::json to_json(const ArchitectureSpec& spec, bool expanded) {
  nlohmann::json doc;
  doc["macro"] = spec.macro_name();
  const Chromosome genes = spec.genes();
  doc["genes"] = std::vector<int>(genes.genes().begin(), genes.genes().end());
  if (expanded) {
    auto slots = nlohmann::json::array();
    int layer = 0;
    for (const auto& s : spec.slots()) {
      if (!s.candidate) continue;
      slots.push_back({{"slot_index", layer++},
                       {"kernel", s.candidate->kernel},
                       {"expansion", s.candidate->expansion},
                       {"se", s.candidate->se},
                       {"in_ch", s.slot.in_channels},
                       {"out_ch", s.slot.out_channels},
                       {"stride", s.slot.stride},
                       {"resolution", s.slot.input_resolution}});
    }
    doc["slots"] = std::move(slots);
  }
  return doc;
}

ArchitectureSpec architecture_from_json(const nlohmann::json& doc,
                                        const MacroArchitecture& macro) {
  if (!doc.is_object() || !doc.contains("genes") || !doc["genes"].is_array()) {
    throw ValidationError("architecture document needs a \"genes\" array");
  }
  if (doc.contains("macro") && doc["macro"] != macro.name()) {
    throw ValidationError("architecture targets macro " + doc["macro"].dump() +
                          ", expected \"" + macro.name() + "\"");
  }
  std::vector<int> genes;
  for (const auto& g : doc["genes"]) {
    if (!g.is_number_integer()) throw ValidationError("genes must be integers");
    genes.push_back(g.get<int>());
  }
  return decode(Chromosome(std::move(genes)), macro);
}

}  // namespace ponas
