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

#include "ponas/analysis.hpp"

#include <cmath>
#include <cstdio>

#include "ponas/error.hpp"
#include "ponas/progressive_builder.hpp"
#include "ponas/rng.hpp"

namespace ponas {

PairedSamples::PairedSamples(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size()) {
    throw UsageError("paired samples need equal lengths, got " + std::to_string(xs_.size()) +
                     " and " + std::to_string(ys_.size()));
  }
  if (xs_.size() < 2) throw UsageError("paired samples need at least two pairs");
}

double kendall_tau(const PairedSamples& samples) {
  const auto xs = samples.xs();
  const auto ys = samples.ys();
  const std::size_t n = samples.size();
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      if (dx == 0.0) ++tied_x;
      if (dy == 0.0) ++tied_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) ++concordant; else ++discordant;
    }
  }
  const long long pairs = static_cast<long long>(n * (n - 1) / 2);
  if (tied_x == pairs || tied_y == pairs) {
    throw ValidationError("Kendall tau undefined: one variable is constant");
  }
  const double denom = std::sqrt(static_cast<double>(pairs - tied_x) *
                                 static_cast<double>(pairs - tied_y));
  return static_cast<double>(concordant - discordant) / denom;
}

RankingStudy synthetic_ranking_study(std::uint64_t seed, const MacroArchitecture& macro,
                                     int count, unsigned threads) {
  if (count < 2) throw UsageError("a ranking study needs at least two architectures");
  const SyntheticEvaluator evaluator(seed, macro);
  const auto built = build_table(macro, evaluator, {threads, {}});
  const auto loss = to_loss_domain(built.table);

  Rng rng(mix64(seed + 1));
  RankingStudy study;
  std::vector<double> xs, ys;
  for (int s = 0; s < count; ++s) {
    std::vector<int> genes(static_cast<std::size_t>(macro.num_searchable()));
    for (auto& g : genes) g = static_cast<int>(rng.below(static_cast<std::uint64_t>(macro.num_candidates())));
    Chromosome c(std::move(genes));
    const double predicted = chromosome_loss(c, loss);
    const double measured = evaluator.evaluate(decode(c, macro));
    xs.push_back(predicted);
    ys.push_back(measured);
    study.samples.push_back({std::move(c), predicted, measured});
  }
  study.tau = kendall_tau(PairedSamples(std::move(xs), std::move(ys)));
  return study;
}

std::string format_fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  // "-0.000000" and "0.000000" mean the same thing; keep one spelling.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string importance_csv(const AccuracyLossTable& loss) {
  std::string out = "layer,max_loss\n";
  const auto importance = layer_importance(loss);
  for (std::size_t l = 0; l < importance.size(); ++l) {
    out += std::to_string(l) + ',' + format_fixed6(importance[l]) + '\n';
  }
  return out;
}

std::string evolution_csv(const EvolutionLog& log) {
  std::string out = "generation,best_loss,mean_loss\n";
  for (const auto& r : log.records) {
    out += std::to_string(r.generation) + ',' + format_fixed6(r.best_loss) + ',' +
           format_fixed6(r.mean_loss) + '\n';
  }
  return out;
}

void export_importance(const AccuracyLossTable& loss, const std::filesystem::path& path) {
  write_text_file(path, importance_csv(loss));
}

void export_evolution(const EvolutionLog& log, const std::filesystem::path& path) {
  write_text_file(path, evolution_csv(log));
}

}  // namespace ponas
