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

#include "ponas/progressive_builder.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "ponas/error.hpp"
#include "ponas/rng.hpp"

namespace ponas {
namespace {

double block_quality(int candidate, int candidates) {
  if (candidates == kNumCandidates) {
    const auto b = CandidateBlock::from_index(candidate);
    return 0.45 * (b.kernel - 3) / 4.0 + 0.35 * (b.expansion == 6 ? 1.0 : 0.0) +
           0.2 * (b.se ? 1.0 : 0.0);
  }
  return candidates == 1 ? 1.0 : static_cast<double>(candidate) / (candidates - 1);
}

std::int64_t product(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

}  // namespace

SyntheticEvaluator::SyntheticEvaluator(std::uint64_t seed, int layers, int candidates,
                                       double noise)
    : seed_(seed), layers_(layers), candidates_(candidates), noise_(noise) {
  if (layers < 1 || candidates < 1) throw UsageError("evaluator needs a non-empty space");
  if (!(noise >= 0.0 && noise <= 0.01)) throw UsageError("evaluator noise must be in [0, 0.01]");
  Rng rng(mix64(seed));
  base_ = rng.uniform(0.74, 0.78);
  utilities_.reserve(static_cast<std::size_t>(layers) * static_cast<std::size_t>(candidates));
  for (int l = 0; l < layers; ++l) {
    const double weight = rng.uniform(0.002, 0.02);
    for (int i = 0; i < candidates; ++i) {
      const double q = std::clamp(block_quality(i, candidates) + rng.uniform(-0.25, 0.25), 0.0, 1.0);
      utilities_.push_back(-weight * (1.0 - q));
    }
  }
}

double SyntheticEvaluator::evaluate(const ArchitectureSpec& spec) const {
  return evaluate_genes(spec.genes());
}

double SyntheticEvaluator::evaluate_genes(const Chromosome& genes) const {
  genes.validate(layers_, candidates_);
  double acc = base_;
  std::uint64_t h = mix64(seed_ ^ 0x5eedULL);
  for (int l = 0; l < layers_; ++l) {
    const int g = genes[static_cast<std::size_t>(l)];
    acc += utility(l, g);
    h = mix64(h ^ static_cast<std::uint64_t>(g + 1));
  }
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
  acc += noise_ * (2.0 * unit - 1.0);
  return quantize_accuracy(std::clamp(acc, 0.0, 1.0));
}

void TwoStageSchedule::validate() const {
  const bool ok = meta_epochs > 0 && finetune_epochs_per_layer > 0 && meta_lr > 0.0 &&
                  finetune_lr > 0.0 && batch_size > 0 &&
                  std::all_of(lr_decay_epochs.begin(), lr_decay_epochs.end(),
                              [](int e) { return e > 0; });
  if (!ok) throw UsageError("two-stage schedule fields must all be positive");
}

nlohmann::json to_json(const TwoStageSchedule& s) {
  return {{"meta_epochs", s.meta_epochs},
          {"finetune_epochs_per_layer", s.finetune_epochs_per_layer},
          {"meta_lr", s.meta_lr},
          {"finetune_lr", s.finetune_lr},
          {"lr_decay_epochs", s.lr_decay_epochs},
          {"batch_size", s.batch_size}};
}

BuildResult build_table(const MacroArchitecture& macro, const Evaluator& evaluator,
                        const BuildOptions& options) {
  const int layers = macro.num_searchable();
  const int candidates = macro.num_candidates();
  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp(threads, 1u, static_cast<unsigned>(candidates));

  std::vector<double> values(static_cast<std::size_t>(layers) *
                             static_cast<std::size_t>(candidates));
  Chromosome context = Chromosome::uniform(layers, kLargestBlockIndex);
  int evaluations = 0;

  for (int l = 0; l < layers; ++l) {
    std::vector<double> row(static_cast<std::size_t>(candidates));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(candidates));
    auto work = [&](unsigned worker) {
      for (int i = static_cast<int>(worker); i < candidates; i += static_cast<int>(threads)) {
        try {
          Chromosome genes = context;
          genes[static_cast<std::size_t>(l)] = i;
          row[static_cast<std::size_t>(i)] = evaluator.evaluate(decode(genes, macro));
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    evaluations += candidates;

    for (int i = 0; i < candidates; ++i) {
      if (errors[static_cast<std::size_t>(i)]) std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
      const double v = row[static_cast<std::size_t>(i)];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("evaluator returned " + std::to_string(v) + " outside [0, 1] at (" +
                              std::to_string(l) + ", " + std::to_string(i) + ")");
      }
    }
    std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(l) * candidates);

    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    context[static_cast<std::size_t>(l)] = static_cast<int>(best);

    if (options.on_layer) {
      options.on_layer(l, std::span<const double>(values).first(
                              static_cast<std::size_t>((l + 1) * candidates)));
    }
  }
  return {AccuracyTable(layers, candidates, std::move(values)), std::move(context), evaluations};
}

FairnessSchedule fairness_schedule(std::uint64_t seed, int candidates, int rounds) {
  if (rounds < 1) throw UsageError("fairness schedule needs at least one round");
  if (candidates < 1) throw UsageError("fairness schedule needs at least one candidate");
  Rng rng(seed);
  FairnessSchedule schedule;
  for (int r = 0; r < rounds; ++r) {
    std::vector<int> order(static_cast<std::size_t>(candidates));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.below(i + 1)]);
    }
    schedule.rounds.push_back(std::move(order));
  }
  return schedule;
}

std::vector<int> TensorCrop::target_shape() const {
  if (dropped) return {};
  std::vector<int> shape;
  for (const auto& r : ranges) shape.push_back(r.length);
  return shape;
}

std::int64_t TensorCrop::source_count() const { return product(source_shape); }

std::int64_t TensorCrop::target_count() const { return dropped ? 0 : product(target_shape()); }

std::int64_t TensorShapeCrop::source_parameter_count() const {
  std::int64_t n = 0;
  for (const auto& t : tensors) n += t.source_count();
  return n;
}

std::int64_t TensorShapeCrop::target_parameter_count() const {
  std::int64_t n = 0;
  for (const auto& t : tensors) n += t.target_count();
  return n;
}

TensorShapeCrop crop_plan(const CandidateBlock& target, const LayerSlot& slot,
                          bool include_norm) {
  target.index();  // rejects non-candidates
  const CandidateBlock largest = CandidateBlock::largest();
  const int cin = slot.in_channels;
  const int cout = slot.out_channels;
  const int src_exp = cin * largest.expansion;
  const int dst_exp = cin * target.expansion;
  const int src_red = (src_exp + 3) / 4;
  const int dst_red = (dst_exp + 3) / 4;
  const int offset = (largest.kernel - target.kernel) / 2;

  auto lead = [](int n) { return DimRange{0, n}; };
  TensorShapeCrop plan{target, {}};
  auto add = [&](std::string name, std::vector<int> shape, std::vector<DimRange> ranges,
                 bool dropped = false) {
    plan.tensors.push_back({std::move(name), std::move(shape), std::move(ranges), dropped});
  };
  auto add_norm = [&](const std::string& prefix, int src, int dst) {
    if (!include_norm) return;
    add(prefix + ".norm.weight", {src}, {lead(dst)});
    add(prefix + ".norm.bias", {src}, {lead(dst)});
  };

  add("expand.weight", {src_exp, cin, 1, 1}, {lead(dst_exp), lead(cin), lead(1), lead(1)});
  add_norm("expand", src_exp, dst_exp);
  add("depthwise.weight", {src_exp, 1, largest.kernel, largest.kernel},
      {lead(dst_exp), lead(1), {offset, target.kernel}, {offset, target.kernel}});
  add_norm("depthwise", src_exp, dst_exp);
  const bool drop_se = !target.se;
  add("se.reduce.weight", {src_red, src_exp, 1, 1},
      {lead(dst_red), lead(dst_exp), lead(1), lead(1)}, drop_se);
  add("se.reduce.bias", {src_red}, {lead(dst_red)}, drop_se);
  add("se.expand.weight", {src_exp, src_red, 1, 1},
      {lead(dst_exp), lead(dst_red), lead(1), lead(1)}, drop_se);
  add("se.expand.bias", {src_exp}, {lead(dst_exp)}, drop_se);
  add("project.weight", {cout, src_exp, 1, 1}, {lead(cout), lead(dst_exp), lead(1), lead(1)});
  add_norm("project", cout, cout);
  return plan;
}

}  // namespace ponas
