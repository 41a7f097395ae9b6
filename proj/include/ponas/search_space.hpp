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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ponas {

inline constexpr int kNumCandidates = 12;
inline constexpr int kLargestBlockIndex = 11;
inline constexpr std::string_view kMacroName = "ponas-v1";

/// One MBConv configuration selectable at a searchable layer.
///
/// Canonical index: kernel-major, then expansion, then SE, i.e.
/// `kernel_rank * 4 + expansion_rank * 2 + se` with kernels {3,5,7} and
/// expansions {3,6}.
struct CandidateBlock {
  int kernel = 3;
  int expansion = 3;
  bool se = false;

  /// Throws UsageError when `index` is outside [0, 12).
  static CandidateBlock from_index(int index);
  int index() const;

  static CandidateBlock largest() { return from_index(kLargestBlockIndex); }

  friend bool operator==(const CandidateBlock&, const CandidateBlock&) = default;
};

/// All 12 candidates in canonical order; element 11 is the largest block.
std::array<CandidateBlock, kNumCandidates> enumerate_candidate_blocks();

std::string to_string(const CandidateBlock& block);

enum class FixedBlock {
  kStemConv3x3,
  kMBConvE1_3x3,
  kHeadConv1x1,
  kAvgPool7x7,
  kFullyConnected,
};

std::string_view to_string(FixedBlock block);

struct LayerSlot {
  int input_resolution = 0;  // square side in pixels
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;
  std::optional<FixedBlock> fixed_block;  // absent for searchable slots

  bool searchable() const { return !fixed_block.has_value(); }

  /// Global pooling collapses the map to 1x1; everything else divides by
  /// the stride.
  int output_resolution() const;

  /// Stride-1 MBConv with matching channel counts carries an identity
  /// shortcut.
  bool has_residual() const;

  friend bool operator==(const LayerSlot&, const LayerSlot&) = default;
};

/// Stem, searchable body and head of the network. Immutable once built.
class MacroArchitecture {
 public:
  /// Validates channel/resolution chaining; throws ValidationError.
  MacroArchitecture(std::string name, std::vector<LayerSlot> slots);

  const std::string& name() const { return name_; }
  std::span<const LayerSlot> slots() const { return slots_; }
  const LayerSlot& slot(std::size_t i) const { return slots_.at(i); }

  int num_searchable() const { return static_cast<int>(searchable_.size()); }
  int num_candidates() const { return kNumCandidates; }

  /// Position in slots() of the layer-th searchable slot.
  std::size_t searchable_slot_index(int layer) const;
  const LayerSlot& searchable_slot(int layer) const {
    return slots_[searchable_slot_index(layer)];
  }

 private:
  std::string name_;
  std::vector<LayerSlot> slots_;
  std::vector<std::size_t> searchable_;
};

/// The 224x224 ImageNet macro-architecture with 19 searchable MBConv slots.
/// The final 320->1280 1x1 projection is treated as a fixed head conv.
const MacroArchitecture& default_macro();

/// Length-L vector of candidate indices, one per searchable slot.
class Chromosome {
 public:
  Chromosome() = default;
  explicit Chromosome(std::vector<int> genes) : genes_(std::move(genes)) {}

  static Chromosome uniform(int length, int gene) {
    return Chromosome(std::vector<int>(static_cast<std::size_t>(length), gene));
  }

  std::span<const int> genes() const { return genes_; }
  std::span<int> genes() { return genes_; }
  int size() const { return static_cast<int>(genes_.size()); }
  int operator[](std::size_t i) const { return genes_[i]; }
  int& operator[](std::size_t i) { return genes_[i]; }

  /// Throws UsageError on length mismatch or out-of-range genes.
  void validate(int num_layers, int num_candidates) const;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
  friend auto operator<=>(const Chromosome&, const Chromosome&) = default;

 private:
  std::vector<int> genes_;
};

std::string to_string(const Chromosome& chromosome);

/// One slot of a decoded architecture: the slot geometry plus the block
/// chosen for it (candidate for searchable slots, fixed otherwise).
struct ResolvedSlot {
  LayerSlot slot;
  std::optional<CandidateBlock> candidate;

  friend bool operator==(const ResolvedSlot&, const ResolvedSlot&) = default;
};

/// Fully concrete architecture, one entry per macro slot in network order.
class ArchitectureSpec {
 public:
  ArchitectureSpec(std::string macro_name, std::vector<ResolvedSlot> slots)
      : macro_name_(std::move(macro_name)), slots_(std::move(slots)) {}

  const std::string& macro_name() const { return macro_name_; }
  std::span<const ResolvedSlot> slots() const { return slots_; }

  /// Re-extracts the gene vector from the searchable slots.
  Chromosome genes() const;

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;

 private:
  std::string macro_name_;
  std::vector<ResolvedSlot> slots_;
};

/// Throws UsageError when the chromosome does not fit the macro.
ArchitectureSpec decode(const Chromosome& chromosome, const MacroArchitecture& macro);

/// `{"macro": ..., "genes": [...]}`; with `expanded`, adds a "slots" array
/// describing every searchable slot.
nlohmann::json to_json(const ArchitectureSpec& spec, bool expanded = false);

/// Reads the "genes" of an architecture document and decodes it against
/// `macro`. Throws ValidationError on malformed documents.
ArchitectureSpec architecture_from_json(const nlohmann::json& doc,
                                        const MacroArchitecture& macro);

}  // namespace ponas
