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
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ponas {

inline constexpr std::string_view kTableFormat = "ponas-acc-table-v1";

/// L x I validation accuracies (fractions in [0,1]), row-major.
class AccuracyTable {
 public:
  /// Throws ValidationError on size mismatch or entries outside [0,1].
  AccuracyTable(int layers, int candidates, std::vector<double> values);

  int layers() const { return layers_; }
  int candidates() const { return candidates_; }
  double at(int layer, int candidate) const {
    return values_[static_cast<std::size_t>(layer * candidates_ + candidate)];
  }
  std::span<const double> row(int layer) const;
  std::span<const double> values() const { return values_; }

  friend bool operator==(const AccuracyTable&, const AccuracyTable&) = default;

 private:
  int layers_;
  int candidates_;
  std::vector<double> values_;
};

/// L x I accuracy losses relative to each row's best block.
///
/// The constructor only enforces non-negativity; the "one exact zero per
/// row" property is guaranteed by to_loss_domain() and checked by
/// has_zero_in_every_row().
class AccuracyLossTable {
 public:
  AccuracyLossTable(int layers, int candidates, std::vector<double> deltas);

  int layers() const { return layers_; }
  int candidates() const { return candidates_; }
  double at(int layer, int candidate) const {
    return deltas_[static_cast<std::size_t>(layer * candidates_ + candidate)];
  }
  std::span<const double> row(int layer) const;
  std::span<const double> values() const { return deltas_; }

  bool has_zero_in_every_row() const;

  friend bool operator==(const AccuracyLossTable&, const AccuracyLossTable&) = default;

 private:
  int layers_;
  int candidates_;
  std::vector<double> deltas_;
};

/// deltas[l,i] = max_j table[l,j] - table[l,i].
AccuracyLossTable to_loss_domain(const AccuracyTable& table);

/// argmax of the row, lowest index on ties. Throws UsageError when the
/// layer is out of range.
int row_best(const AccuracyTable& table, int layer);

/// argmin of the loss row, lowest index on ties.
int row_best(const AccuracyLossTable& loss, int layer);

/// argmax of the loss row (the block losing the most), lowest index on ties.
int row_worst(const AccuracyLossTable& loss, int layer);

/// Maximum loss of each layer.
std::vector<double> layer_importance(const AccuracyLossTable& loss);

/// Rounds to 6 significant digits; the JSON writer then emits at most six
/// digits and reading the file back reproduces the double exactly.
double quantize_accuracy(double value);

enum class SynthProfile { kPeaked, kUniform };

SynthProfile parse_synth_profile(std::string_view name);

/// Deterministic stand-in table. "peaked": each layer prefers one block
/// and accuracy decays smoothly away from it, base in [0.60, 0.75], noise
/// at most 0.005. "uniform": independent entries in [0.60, 0.75].
AccuracyTable synth_table(std::uint64_t seed, int layers, int candidates,
                          SynthProfile profile = SynthProfile::kPeaked);

nlohmann::json to_json(const AccuracyTable& table);
/// Same layout as the accuracy table plus `"domain": "loss"`.
nlohmann::json to_json(const AccuracyLossTable& loss);

/// Throw ValidationError with distinct messages for a wrong format tag,
/// dimension mismatch and out-of-range entries.
AccuracyTable table_from_json(const nlohmann::json& doc);
AccuracyLossTable loss_table_from_json(const nlohmann::json& doc);

/// Reads a JSON document; IoError when unreadable, ValidationError when
/// not JSON.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

AccuracyTable load_table(const std::filesystem::path& path);
void save_table(const std::filesystem::path& path, const AccuracyTable& table);

}  // namespace ponas
