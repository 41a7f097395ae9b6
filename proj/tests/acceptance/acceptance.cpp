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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ponas/analysis.hpp"
#include "ponas/cost_model.hpp"
#include "ponas/error.hpp"
#include "ponas/progressive_builder.hpp"
#include "ponas/specializer.hpp"
#include "test_support.hpp"

using namespace ponas;

namespace {

constexpr std::int64_t kUnbounded = std::int64_t{1} << 62;

// Golden totals from tests/oracles/cost_oracle.py.
constexpr CostReport kLargestGolden{708'804'992, 15'331'256};
constexpr CostReport kSmallestGolden{315'629'504, 4'437'128};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %d. %s: %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str());
  std::fflush(stdout);
}

Chromosome startpoint(const AccuracyLossTable& loss) {
  std::vector<int> genes;
  for (int l = 0; l < loss.layers(); ++l) genes.push_back(row_best(loss, l));
  return Chromosome(genes);
}

// Every GA run in this suite goes through here. The observer re-derives
// costs and losses independently and records any invariant breach; each
// run is repeated to check seed determinism.
struct GaAudit {
  int runs = 0;
  int violations = 0;
  std::string first_violation;

  void flag(const std::string& what) {
    if (violations++ == 0) first_violation = what;
  }

  SpecializationResult run(const AccuracyLossTable& loss, const LayerCostTable& costs,
                           std::int64_t ceiling, const GAConfig& cfg, double* best_seen = nullptr) {
    ++runs;
    double seen = INFINITY;
    auto observer = [&](int, std::span<const Chromosome> pop) {
      for (const auto& c : pop) {
        std::int64_t cost = costs.base();
        double l = 0.0;
        for (int k = 0; k < c.size(); ++k) {
          cost += costs.at(k, c[static_cast<std::size_t>(k)]);
          l += loss.at(k, c[static_cast<std::size_t>(k)]);
        }
        if (cost > ceiling) flag("infeasible chromosome in a population");
        seen = std::min(seen, l);
      }
    };
    auto result = specialize(loss, costs, ceiling, cfg, observer);
    const auto& recs = result.log.records;
    for (std::size_t g = 1; g < recs.size(); ++g)
      if (recs[g].best_loss > recs[g - 1].best_loss) flag("best loss increased");
    if (costs.cost(result.genes) > ceiling) flag("returned chromosome infeasible");
    if (result.loss > seen + 1e-12) flag("returned worse than the best chromosome seen");
    const auto again = specialize(loss, costs, ceiling, cfg);
    if (!(again.genes == result.genes) || again.log.records.size() != recs.size()) {
      flag("rerun with the same seed diverged");
    } else {
      for (std::size_t g = 0; g < recs.size(); ++g) {
        if (again.log.records[g].best_loss != recs[g].best_loss ||
            again.log.records[g].mean_loss != recs[g].mean_loss) {
          flag("rerun log diverged");
          break;
        }
      }
    }
    if (best_seen) *best_seen = seen;
    return result;
  }
};

GaAudit audit;

int run_cli(const std::vector<std::string>& args, std::string& out) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  out = o.str();
  return code;
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int main() {
  const auto tmp = std::filesystem::temp_directory_path() / "ponas_acceptance";
  std::filesystem::create_directories(tmp);
  const auto& macro = default_macro();

  report(1, "specialization speed (pop 20, 1000 generations, mutation 0.1, 19x12, FLOPs)", [&] {
    const auto table_path = (tmp / "table.json").string();
    save_table(table_path, synth_table(1, 19, 12));
    std::string out;
    const auto t0 = Clock::now();
    const int code = run_cli({"specialize", "--table", table_path, "--metric", "flops",
                              "--ceiling", "330000000", "--generations", "1000", "--population",
                              "20", "--mutation", "0.1", "--seed", "7"},
                             out);
    const double cli_s = seconds_since(t0);

    const auto loss = to_loss_domain(synth_table(1, 19, 12));
    GAConfig cfg;
    cfg.seed = 7;
    const auto t1 = Clock::now();
    const auto r = audit.run(loss, LayerCostTable::from_macro(macro, CostMetric::kFlops),
                             330'000'000, cfg);
    const double lib_s = seconds_since(t1);
    const bool ok = code == 0 && cli_s < 10.0 && r.log.records.size() == 1000;
    return Verdict{ok, fmt("cli %.3f s", cli_s) + fmt(", library %.3f s (limit 10 s)", lib_s)};
  });

  report(2, "oracle equivalence on 100 small binding instances", [&] {
    const auto t0 = Clock::now();
    int matched = 0, instances = 0, bad = 0;
    Rng rng(20240601);
    while (instances < 100) {
      const int layers = 3 + static_cast<int>(rng.below(3));
      const int candidates = 3 + static_cast<int>(rng.below(2));
      const auto loss = testing::random_loss_table(rng, layers, candidates);
      const auto costs = testing::random_costs(rng, layers, candidates);
      const auto lo = costs.cheapest_cost();
      const auto hi = costs.cost(startpoint(loss));
      if (hi <= lo) continue;  // unconstrained optimum is also the cheapest: not binding
      const auto ceiling = lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo)));
      ++instances;
      GAConfig cfg;
      cfg.seed = rng.next_u64();
      double seen = 0.0;
      const auto r = audit.run(loss, costs, ceiling, cfg, &seen);
      const double optimum = chromosome_loss(brute_force(loss, costs, ceiling), loss);
      if (std::abs(r.loss - optimum) <= 1e-12) ++matched;
      if (costs.cost(r.genes) > ceiling || r.loss > seen + 1e-12) ++bad;
    }
    const double s = seconds_since(t0);
    return Verdict{matched >= 95 && bad == 0 && s < 60.0,
                   std::to_string(matched) + "/100 optimal (need >= 95), " + std::to_string(bad) +
                       " infeasible/regressed, " + fmt("%.2f s (limit 60 s)", s)};
  });

  report(3, "unbounded ceiling returns the row-best chromosome", [&] {
    int exact = 0;
    const auto costs = LayerCostTable::from_macro(macro, CostMetric::kFlops);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto table = synth_table(1000 + seed, 19, 12,
                                     seed % 2 ? SynthProfile::kUniform : SynthProfile::kPeaked);
      const auto loss = to_loss_domain(table);
      GAConfig cfg;
      cfg.seed = seed;
      const auto r = audit.run(loss, costs, kUnbounded, cfg);
      std::vector<int> best;
      for (int l = 0; l < 19; ++l) best.push_back(row_best(table, l));
      if (r.genes == Chromosome(best) && r.loss == 0.0) ++exact;
    }
    return Verdict{exact == 20, std::to_string(exact) + "/20 exact"};
  });

  report(4, "cost-model golden values", [&] {
    const auto e1 = fixed_slot_cost(macro.slot(1));
    const auto stem = fixed_slot_cost(macro.slot(0));
    const auto fc = fixed_slot_cost(macro.slots().back());
    const auto largest = architecture_cost(decode(Chromosome::uniform(19, 11), macro));
    const auto smallest = architecture_cost(decode(Chromosome::uniform(19, 0), macro));
    const bool ok = e1.flops == 10'035'200 && stem.flops == 10'838'016 && fc.flops == 1'280'000 &&
                    fc.params == 1'281'000 && largest == kLargestGolden &&
                    smallest == kSmallestGolden && smallest.flops < largest.flops;
    return Verdict{ok, "largest " + std::to_string(largest.flops) + " MACs / " +
                           std::to_string(largest.params) + " params, smallest " +
                           std::to_string(smallest.flops) + " / " +
                           std::to_string(smallest.params)};
  });

  report(5, "build-table: 228 evaluations, byte-identical across runs and threads", [&] {
    std::vector<std::string> outs;
    for (const char* threads : {"1", "1", "4", "12"}) {
      std::string out;
      if (run_cli({"build-table", "--seed", "5", "--threads", threads}, out) != 0) {
        return Verdict{false, "build-table failed"};
      }
      outs.push_back(out);
    }
    const auto doc = nlohmann::json::parse(outs[0]);
    bool same = true;
    for (const auto& o : outs) same = same && o == outs[0];

    struct Counting final : Evaluator {
      explicit Counting(const Evaluator& inner) : inner(inner) {}
      double evaluate(const ArchitectureSpec& s) const override {
        ++calls;
        return inner.evaluate(s);
      }
      const Evaluator& inner;
      mutable std::atomic<int> calls{0};
    };
    const SyntheticEvaluator eval(5, macro);
    Counting counting(eval);
    build_table(macro, counting, {4, {}});

    const bool ok = same && doc["evaluations"] == 228 && counting.calls == 228;
    return Verdict{ok, "manifest evaluations " + doc["evaluations"].dump() + ", counted " +
                           std::to_string(counting.calls.load()) +
                           (same ? ", 4 runs identical" : ", outputs differ")};
  });

  report(6, "loss-domain properties on 1000 random tables", [&] {
    Rng rng(6006);
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
      const int layers = 1 + static_cast<int>(rng.below(19));
      const int candidates = 1 + static_cast<int>(rng.below(12));
      const auto table = testing::dyadic_table(rng, layers, candidates);
      const auto loss = to_loss_domain(table);
      bool ok = loss.has_zero_in_every_row();
      std::vector<double> shifted(table.values().begin(), table.values().end());
      for (int l = 0; l < layers; ++l) {
        for (double d : loss.row(l)) ok = ok && d >= 0.0;
        ok = ok && row_best(loss, l) == row_best(table, l);
        const double c = static_cast<double>(rng.between(-1 << 17, 1 << 17)) * testing::kGrid;
        for (int i = 0; i < candidates; ++i) shifted[static_cast<std::size_t>(l * candidates + i)] += c;
      }
      ok = ok && to_loss_domain(AccuracyTable(layers, candidates, shifted)) == loss;
      bad += !ok;
    }
    return Verdict{bad == 0, std::to_string(1000 - bad) + "/1000 tables satisfy all properties"};
  });

  report(7, "Kendall tau examples and synthetic ranking", [&] {
    const double a = kendall_tau({{1, 2, 3}, {10, 20, 30}});
    const double b = kendall_tau({{1, 2, 3}, {3, 2, 1}});
    const double c = kendall_tau({{1, 2, 3}, {2, 1, 3}});
    const auto study = synthetic_ranking_study(42, macro, 6);
    const bool ok = a == 1.0 && b == -1.0 && c == 1.0 / 3.0 && study.tau <= -0.6;
    return Verdict{ok, fmt("tau = %.6f, ", a) + fmt("%.6f, ", b) + fmt("%.6f; ", c) +
                           fmt("synthetic six-model tau = %.6f (need <= -0.6)", study.tau)};
  });

  report(8, "improving the most important layer beats the least important", [&] {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto loss = to_loss_domain(synth_table(8000 + seed, 19, 12));
      const auto ab = ablation_networks(loss);
      const double base = chromosome_loss(ab.worst, loss);
      const double most = base - chromosome_loss(ab.worst_plus_most, loss);
      const double least = base - chromosome_loss(ab.worst_plus_least, loss);
      ok += most >= least;
    }
    return Verdict{ok == 100, std::to_string(ok) + "/100 tables"};
  });

  report(9, "GA invariants over every logged run", [&] {
    return Verdict{audit.violations == 0 && audit.runs >= 121,
                   std::to_string(audit.runs) + " runs audited, " +
                       std::to_string(audit.violations) + " violations" +
                       (audit.violations ? " (first: " + audit.first_violation + ")" : "")};
  });

  std::filesystem::remove_all(tmp);
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures == 0 ? 0 : 1;
}
