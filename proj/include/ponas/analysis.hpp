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
#include <string>
#include <vector>

#include "ponas/accuracy_table.hpp"
#include "ponas/search_space.hpp"
#include "ponas/specializer.hpp"

namespace ponas {

/// Paired observations for rank correlation; at least two, equal lengths.
class PairedSamples {
 public:
  /// Throws UsageError on length mismatch or fewer than two pairs.
  PairedSamples(std::vector<double> xs, std::vector<double> ys);

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::size_t size() const { return xs_.size(); }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Kendall's tau-b with tie correction, by O(n^2) pair enumeration. Throws
/// ValidationError when either variable is constant.
double kendall_tau(const PairedSamples& samples);

struct RankingSample {
  Chromosome genes;
  double predicted_loss = 0.0;
  double measured_accuracy = 0.0;
};

struct RankingStudy {
  std::vector<RankingSample> samples;
  double tau = 0.0;  // predicted loss vs measured accuracy; negative is good
};

/// Builds the table of a seeded synthetic world over `macro`, samples
/// `count` random architectures, and correlates their table-predicted
/// loss with the accuracy the evaluator actually reports.
RankingStudy synthetic_ranking_study(std::uint64_t seed, const MacroArchitecture& macro,
                                     int count = 6, unsigned threads = 1);

/// Fixed-point text with six decimals, the format of every CSV we write.
std::string format_fixed6(double value);

/// `layer,max_loss` CSV text.
std::string importance_csv(const AccuracyLossTable& loss);
/// `generation,best_loss,mean_loss` CSV text, one row per generation.
std::string evolution_csv(const EvolutionLog& log);

/// Write the CSVs above; IoError carries the path.
void export_importance(const AccuracyLossTable& loss, const std::filesystem::path& path);
void export_evolution(const EvolutionLog& log, const std::filesystem::path& path);

}  // namespace ponas
