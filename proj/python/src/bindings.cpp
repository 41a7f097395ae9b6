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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "ponas/accuracy_table.hpp"
#include "ponas/analysis.hpp"
#include "ponas/cost_model.hpp"
#include "ponas/error.hpp"
#include "ponas/progressive_builder.hpp"
#include "ponas/search_space.hpp"
#include "ponas/specializer.hpp"

namespace py = pybind11;
using namespace ponas;

namespace {

using Matrix = std::vector<std::vector<double>>;

std::vector<int> to_list(const Chromosome& c) { return {c.genes().begin(), c.genes().end()}; }

Chromosome from_list(const std::vector<int>& genes) { return Chromosome(genes); }

template <typename Table>
Matrix rows(const Table& t) {
  Matrix out;
  for (int l = 0; l < t.layers(); ++l) {
    const auto r = t.row(l);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

std::vector<double> flatten(const Matrix& m, int& layers, int& candidates) {
  layers = static_cast<int>(m.size());
  candidates = m.empty() ? 0 : static_cast<int>(m.front().size());
  std::vector<double> flat;
  for (const auto& r : m) {
    if (static_cast<int>(r.size()) != candidates) {
      throw ValidationError("dimension mismatch: rows must all hold " +
                            std::to_string(candidates) + " values");
    }
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return flat;
}

AccuracyTable make_table(const Matrix& m) {
  int layers = 0, candidates = 0;
  auto flat = flatten(m, layers, candidates);
  return AccuracyTable(layers, candidates, std::move(flat));
}

AccuracyLossTable make_loss(const Matrix& m) {
  int layers = 0, candidates = 0;
  auto flat = flatten(m, layers, candidates);
  return AccuracyLossTable(layers, candidates, std::move(flat));
}

// Wraps a Python callable taking the gene list and returning an accuracy.
class CallableEvaluator final : public Evaluator {
 public:
  explicit CallableEvaluator(py::function fn) : fn_(std::move(fn)) {}
  double evaluate(const ArchitectureSpec& spec) const override {
    return fn_(to_list(spec.genes())).cast<double>();
  }

 private:
  py::function fn_;
};

py::dict result_dict(const SpecializationResult& r) {
  py::dict d;
  d["genes"] = to_list(r.genes);
  d["loss"] = r.loss;
  d["cost"] = r.log.best_cost;
  if (r.log.best_report) {
    d["flops"] = r.log.best_report->flops;
    d["params"] = r.log.best_report->params;
  }
  py::list curve;
  for (const auto& rec : r.log.records) {
    curve.append(py::make_tuple(rec.generation, rec.best_loss, rec.mean_loss));
  }
  d["log"] = curve;
  return d;
}

GAConfig make_config(int generations, int population, double mutation, std::uint64_t seed,
                     const std::string& selection) {
  GAConfig cfg;
  cfg.generations = generations;
  cfg.population = population;
  cfg.parents_kept = population / 2;
  cfg.mutation_prob = mutation;
  cfg.seed = seed;
  cfg.selection = parse_selection_mode(selection);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_ponas, m) {
  m.doc() = "Progressive table building and GA specialization over MBConv blocks.";
  m.attr("__version__") = PONAS_VERSION;
  m.attr("NUM_CANDIDATES") = kNumCandidates;
  m.attr("LARGEST_BLOCK") = kLargestBlockIndex;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());

  py::class_<CandidateBlock>(m, "CandidateBlock")
      .def_static("from_index", &CandidateBlock::from_index)
      .def_readonly("kernel", &CandidateBlock::kernel)
      .def_readonly("expansion", &CandidateBlock::expansion)
      .def_readonly("se", &CandidateBlock::se)
      .def_property_readonly("index", &CandidateBlock::index)
      .def("__repr__", [](const CandidateBlock& b) { return std::string(to_string(b)); });

  m.def("candidate_blocks", &enumerate_candidate_blocks);
  m.def("num_searchable", [] { return default_macro().num_searchable(); });

  m.def(
      "cost",
      [](const std::vector<int>& genes) {
        const auto report = architecture_cost(decode(from_list(genes), default_macro()));
        return py::make_tuple(report.flops, report.params);
      },
      py::arg("genes"), "(flops, params) of the default macro with the given blocks.");

  m.def(
      "synth_table",
      [](std::uint64_t seed, int layers, int candidates, const std::string& profile) {
        return rows(synth_table(seed, layers, candidates, parse_synth_profile(profile)));
      },
      py::arg("seed"), py::arg("layers") = 19, py::arg("candidates") = kNumCandidates,
      py::arg("profile") = "peaked");

  m.def("to_loss_domain", [](const Matrix& acc) { return rows(to_loss_domain(make_table(acc))); },
        py::arg("accuracy"));
  m.def("load_table", [](const std::string& path) { return rows(load_table(path)); });
  m.def("save_table",
        [](const std::string& path, const Matrix& acc) { save_table(path, make_table(acc)); });

  m.def(
      "build_table",
      [](std::uint64_t seed, double noise, unsigned threads) {
        const SyntheticEvaluator evaluator(seed, default_macro(), noise);
        BuildOptions opts;
        opts.threads = threads;
        BuildResult r = [&] {
          py::gil_scoped_release release;
          return build_table(default_macro(), evaluator, opts);
        }();
        return py::make_tuple(rows(r.table), to_list(r.best_genes), r.evaluations);
      },
      py::arg("seed") = 42, py::arg("noise") = 0.001, py::arg("threads") = 1,
      "Builds the table with the synthetic evaluator. Returns (table, best_genes, evaluations).");
  m.def(
      "build_table_with",
      [](py::function evaluate) {
        const CallableEvaluator evaluator(std::move(evaluate));
        auto r = build_table(default_macro(), evaluator);
        return py::make_tuple(rows(r.table), to_list(r.best_genes), r.evaluations);
      },
      py::arg("evaluate"),
      "Builds the table calling evaluate(genes) -> accuracy for every candidate.");

  m.def(
      "specialize",
      [](const Matrix& loss, const std::string& metric, std::int64_t ceiling, int generations,
         int population, double mutation, std::uint64_t seed, const std::string& selection) {
        const auto cfg = make_config(generations, population, mutation, seed, selection);
        return result_dict(specialize(make_loss(loss), Constraint(parse_cost_metric(metric), ceiling),
                                      default_macro(), cfg));
      },
      py::arg("loss"), py::arg("metric"), py::arg("ceiling"), py::arg("generations") = 1000,
      py::arg("population") = 20, py::arg("mutation") = 0.1, py::arg("seed") = 42,
      py::arg("selection") = "pooled");
  m.def(
      "specialize_costs",
      [](const Matrix& loss, const std::vector<std::vector<std::int64_t>>& costs,
         std::int64_t base, std::int64_t ceiling, int generations, int population,
         double mutation, std::uint64_t seed, const std::string& selection) {
        const auto cfg = make_config(generations, population, mutation, seed, selection);
        return result_dict(specialize(make_loss(loss), LayerCostTable(base, costs), ceiling, cfg));
      },
      py::arg("loss"), py::arg("costs"), py::arg("base"), py::arg("ceiling"),
      py::arg("generations") = 1000, py::arg("population") = 20, py::arg("mutation") = 0.1,
      py::arg("seed") = 42, py::arg("selection") = "pooled",
      "Specialize against an explicit per-layer cost table.");

  m.def(
      "brute_force",
      [](const Matrix& loss, const std::vector<std::vector<std::int64_t>>& costs,
         std::int64_t base, std::int64_t ceiling) {
        return to_list(brute_force(make_loss(loss), LayerCostTable(base, costs), ceiling));
      },
      py::arg("loss"), py::arg("costs"), py::arg("base"), py::arg("ceiling"));

  m.def("chromosome_loss", [](const std::vector<int>& genes, const Matrix& loss) {
    return chromosome_loss(from_list(genes), make_loss(loss));
  });
  m.def("layer_importance", [](const Matrix& loss) { return layer_importance(make_loss(loss)); });
  m.def("ablation_networks", [](const Matrix& loss) {
    const auto a = ablation_networks(make_loss(loss));
    py::dict d;
    d["worst"] = to_list(a.worst);
    d["worst_plus_least"] = to_list(a.worst_plus_least);
    d["worst_plus_most"] = to_list(a.worst_plus_most);
    d["least_important_layer"] = a.least_important_layer;
    d["most_important_layer"] = a.most_important_layer;
    return d;
  });

  m.def(
      "kendall_tau",
      [](std::vector<double> xs, std::vector<double> ys) {
        return kendall_tau(PairedSamples(std::move(xs), std::move(ys)));
      },
      py::arg("xs"), py::arg("ys"));
}
