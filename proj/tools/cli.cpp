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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>

#include "ponas/accuracy_table.hpp"
#include "ponas/analysis.hpp"
#include "ponas/cost_model.hpp"
#include "ponas/error.hpp"
#include "ponas/progressive_builder.hpp"
#include "ponas/search_space.hpp"
#include "ponas/specializer.hpp"

namespace ponas::cli {
namespace {

using nlohmann::json;

constexpr std::string_view kCostTableFormat = "ponas-cost-table-v1";

struct Globals {
  std::uint64_t seed = 42;
  std::string out_path;
  std::string format = "json";
  unsigned threads = 0;
};

struct TableArgs {
  std::string table_path;
  std::string costs_path;
  std::string metric = "flops";
  std::int64_t ceiling = 0;
};

class Session {
 public:
  Session(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  json header(std::string_view command) const {
    return {{"tool_version", PONAS_VERSION}, {"seed", g_.seed}, {"command", command}};
  }

  bool csv() const { return g_.format == "csv"; }

  void require_json(std::string_view command) const {
    if (csv()) throw UsageError(std::string(command) + " has no CSV output; use --format json");
  }

  // Deterministic document to stdout; the --out copy may carry extra
  // run-dependent fields.
  void emit(const json& doc, const json& extra = json::object()) const {
    out_ << doc.dump(2) << '\n';
    if (!g_.out_path.empty()) {
      json copy = doc;
      copy.update(extra);
      write_text_file(g_.out_path, copy.dump(2) + "\n");
    }
  }

  void emit_text(const std::string& text) const {
    out_ << text;
    if (!g_.out_path.empty()) write_text_file(g_.out_path, text);
  }

  const Globals& globals() const { return g_; }

 private:
  const Globals& g_;
  std::ostream& out_;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <typename T>
T parse_number(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_integral_v<T>) v = static_cast<T>(std::stoll(s, &used));
    else v = static_cast<T>(std::stod(s, &used));
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw UsageError("bad " + std::string(what) + " '" + s + "'");
  }
}

Chromosome parse_genes(const std::string& text, const MacroArchitecture& macro) {
  if (text == "largest") return Chromosome::uniform(macro.num_searchable(), kLargestBlockIndex);
  if (text == "smallest") return Chromosome::uniform(macro.num_searchable(), 0);
  std::vector<int> genes;
  for (const auto& part : split(text, ',')) genes.push_back(parse_number<int>(part, "gene"));
  Chromosome c(std::move(genes));
  c.validate(macro.num_searchable(), macro.num_candidates());
  return c;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_number<double>(part, "number"));
  return values;
}

json genes_json(const Chromosome& c) {
  return std::vector<int>(c.genes().begin(), c.genes().end());
}

// Accepts an accuracy table, a loss table, or a build-table manifest.
AccuracyLossTable load_loss_input(const std::string& path) {
  json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("table") && doc["table"].is_object()) doc = doc["table"];
  try {
    if (doc.is_object() && doc.value("domain", "") == "loss") return loss_table_from_json(doc);
    return to_loss_domain(table_from_json(doc));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

AccuracyTable load_accuracy_input(const std::string& path) {
  json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("table") && doc["table"].is_object()) doc = doc["table"];
  try {
    return table_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

LayerCostTable load_cost_table(const std::string& path) {
  const json doc = read_json_file(path);
  if (!doc.is_object() || doc.value("format", "") != kCostTableFormat) {
    throw ValidationError(path + ": \"format\" must be \"" + std::string(kCostTableFormat) + "\"");
  }
  try {
    return LayerCostTable(doc.at("base").get<std::int64_t>(),
                          doc.at("costs").get<std::vector<std::vector<std::int64_t>>>());
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed cost table: " + e.what());
  }
}

// Cost side of a search problem: a user-supplied table, or the default
// macro's costs for the chosen metric.
struct Problem {
  AccuracyLossTable loss;
  std::optional<LayerCostTable> custom_costs;
  CostMetric metric;
  std::int64_t ceiling;

  LayerCostTable costs() const {
    return custom_costs ? *custom_costs : LayerCostTable::from_macro(default_macro(), metric);
  }
};

Problem load_problem(const TableArgs& a) {
  Problem p{load_loss_input(a.table_path), std::nullopt, parse_cost_metric(a.metric),
            a.ceiling};
  if (a.ceiling <= 0) throw UsageError("--ceiling must be positive");
  if (!a.costs_path.empty()) p.custom_costs = load_cost_table(a.costs_path);
  return p;
}

// Cost fields of a result: full FLOPs/params when the default macro
// applies, the single custom cost otherwise.
void add_cost_fields(json& doc, const Problem& p, const Chromosome& genes) {
  if (p.custom_costs) {
    doc["cost"] = p.custom_costs->cost(genes);
    return;
  }
  const auto report = architecture_cost(decode(genes, default_macro()));
  doc["flops"] = report.flops;
  doc["params"] = report.params;
}

void add_table_options(CLI::App* cmd, TableArgs& a, bool with_ceiling) {
  cmd->add_option("--table", a.table_path, "Accuracy table, loss table or build manifest")
      ->required();
  if (!with_ceiling) return;
  cmd->add_option("--costs", a.costs_path, "Per-layer cost table (" +
                                               std::string(kCostTableFormat) +
                                               "); overrides the default macro");
  cmd->add_option("--metric", a.metric, "flops or params")
      ->check(CLI::IsMember({"flops", "params"}));
  cmd->add_option("--ceiling", a.ceiling, "Cost ceiling in the chosen metric")->required();
}

int cmd_cost(const Session& s, const std::string& genes_text, bool expand) {
  const auto spec = decode(parse_genes(genes_text, default_macro()), default_macro());
  const auto report = architecture_cost(spec);
  if (s.csv()) {
    s.emit_text("flops,params\n" + std::to_string(report.flops) + "," +
                std::to_string(report.params) + "\n");
    return kOk;
  }
  json doc = s.header("cost");
  doc.update(to_json(report));
  doc["architecture"] = to_json(spec, expand);
  s.emit(doc);
  return kOk;
}

int cmd_build_table(const Session& s, const std::string& evaluator_name, double noise) {
  s.require_json("build-table");
  if (evaluator_name != "synthetic") {
    throw UsageError("unknown evaluator '" + evaluator_name + "' (available: synthetic)");
  }
  const SyntheticEvaluator evaluator(s.globals().seed, default_macro(), noise);
  const auto result = build_table(default_macro(), evaluator, {s.globals().threads, {}});
  json doc = s.header("build-table");
  doc["schedule"] = to_json(TwoStageSchedule{});
  doc["evaluator"] = evaluator_name;
  doc["evaluations"] = result.evaluations;
  doc["table"] = to_json(result.table);
  doc["best_genes"] = genes_json(result.best_genes);
  s.emit(doc);
  return kOk;
}

int cmd_synth_table(const Session& s, int layers, int candidates, const std::string& profile) {
  s.require_json("synth-table");
  json doc = to_json(synth_table(s.globals().seed, layers, candidates, parse_synth_profile(profile)));
  doc.update(s.header("synth-table"));
  s.emit(doc);
  return kOk;
}

int cmd_loss_table(const Session& s, const std::string& path) {
  const auto loss = load_loss_input(path);
  if (s.csv()) {
    std::string text;
    for (int l = 0; l < loss.layers(); ++l) {
      for (int i = 0; i < loss.candidates(); ++i) {
        text += (i ? "," : "") + format_fixed6(loss.at(l, i));
      }
      text += '\n';
    }
    s.emit_text(text);
    return kOk;
  }
  json doc = to_json(loss);
  doc.update(s.header("loss-table"));
  s.emit(doc);
  return kOk;
}

int cmd_specialize(const Session& s, const TableArgs& a, GAConfig cfg,
                   const std::string& selection, const std::string& log_path) {
  const Problem p = load_problem(a);
  cfg.seed = s.globals().seed;
  cfg.parents_kept = cfg.population / 2;
  cfg.selection = parse_selection_mode(selection);

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = specialize(p.loss, p.costs(), p.ceiling, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!log_path.empty()) export_evolution(result.log, log_path);
  if (s.csv()) {
    s.emit_text(evolution_csv(result.log));
    return kOk;
  }
  json doc = s.header("specialize");
  doc["genes"] = genes_json(result.genes);
  doc["loss"] = result.loss;
  add_cost_fields(doc, p, result.genes);
  doc["generations"] = cfg.generations;
  doc["population"] = cfg.population;
  doc["mutation"] = cfg.mutation_prob;
  doc["selection"] = to_string(cfg.selection);
  doc["metric"] = p.custom_costs ? "custom" : std::string(to_string(p.metric));
  doc["ceiling"] = p.ceiling;
  s.emit(doc, {{"wall_clock_s", seconds}});
  return kOk;
}

int cmd_oracle(const Session& s, const TableArgs& a) {
  s.require_json("oracle");
  const Problem p = load_problem(a);
  const auto best = brute_force(p.loss, p.costs(), p.ceiling);
  json doc = s.header("oracle");
  doc["genes"] = genes_json(best);
  doc["loss"] = chromosome_loss(best, p.loss);
  add_cost_fields(doc, p, best);
  doc["metric"] = p.custom_costs ? "custom" : std::string(to_string(p.metric));
  doc["ceiling"] = p.ceiling;
  s.emit(doc);
  return kOk;
}

int cmd_importance(const Session& s, const std::string& path) {
  const auto loss = load_loss_input(path);
  if (s.csv()) {
    s.emit_text(importance_csv(loss));
    return kOk;
  }
  json doc = s.header("analyze importance");
  doc["max_loss"] = layer_importance(loss);
  s.emit(doc);
  return kOk;
}

int cmd_kendall(const Session& s, const std::string& xs, const std::string& ys,
                int synthetic_samples) {
  if (synthetic_samples > 0) {
    if (!xs.empty() || !ys.empty()) throw UsageError("--synthetic excludes --xs/--ys");
    const auto study = synthetic_ranking_study(s.globals().seed, default_macro(),
                                               synthetic_samples, s.globals().threads);
    if (s.csv()) {
      std::string text = "predicted_loss,measured_accuracy\n";
      for (const auto& r : study.samples) {
        text += format_fixed6(r.predicted_loss) + "," + format_fixed6(r.measured_accuracy) + "\n";
      }
      s.emit_text(text + "tau," + format_fixed6(study.tau) + "\n");
      return kOk;
    }
    json doc = s.header("analyze kendall");
    doc["tau"] = study.tau;
    auto samples = json::array();
    for (const auto& r : study.samples) {
      samples.push_back({{"genes", genes_json(r.genes)},
                         {"predicted_loss", r.predicted_loss},
                         {"measured_accuracy", r.measured_accuracy}});
    }
    doc["samples"] = std::move(samples);
    s.emit(doc);
    return kOk;
  }
  if (xs.empty() || ys.empty()) throw UsageError("kendall needs --xs and --ys, or --synthetic N");
  const double tau = kendall_tau(PairedSamples(parse_doubles(xs), parse_doubles(ys)));
  if (s.csv()) {
    s.emit_text(format_fixed6(tau) + "\n");
    return kOk;
  }
  json doc = s.header("analyze kendall");
  doc["tau"] = tau;
  doc["tau_fixed"] = format_fixed6(tau);
  s.emit(doc);
  return kOk;
}

int cmd_ablation(const Session& s, const std::string& path) {
  s.require_json("analyze ablation-worst");
  const auto loss = load_loss_input(path);
  const auto ab = ablation_networks(loss);
  const bool default_space =
      loss.layers() == default_macro().num_searchable() && loss.candidates() == kNumCandidates;
  auto entry = [&](const Chromosome& c, std::optional<int> layer) {
    json e = {{"genes", genes_json(c)}, {"loss", chromosome_loss(c, loss)}};
    if (layer) e["improved_layer"] = *layer;
    if (default_space) {
      const auto report = architecture_cost(decode(c, default_macro()));
      e["flops"] = report.flops;
      e["params"] = report.params;
    }
    return e;
  };
  json doc = s.header("analyze ablation-worst");
  doc["worst"] = entry(ab.worst, std::nullopt);
  doc["worst_plus_least"] = entry(ab.worst_plus_least, ab.least_important_layer);
  doc["worst_plus_most"] = entry(ab.worst_plus_most, ab.most_important_layer);
  s.emit(doc);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Accuracy-table network specialization", "ponas"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (default 42)");
  app.add_option("--out", g.out_path, "Also write the primary output to this file");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", g.threads, "Worker threads (0 = available parallelism)");

  std::string genes_text;
  bool expand = false;
  auto* cost = app.add_subcommand("cost", "FLOPs and parameters of an architecture");
  cost->add_option("--genes", genes_text, "Comma-separated genes, 'largest' or 'smallest'")
      ->required();
  cost->add_flag("--expand", expand, "Include the per-slot listing");

  std::string evaluator_name = "synthetic";
  double noise = 0.001;
  auto* build = app.add_subcommand("build-table", "Fill the accuracy table layer by layer");
  build->add_option("--evaluator", evaluator_name, "Evaluator backend (synthetic)");
  build->add_option("--noise", noise, "Synthetic evaluator noise amplitude");

  int synth_layers = 19, synth_candidates = kNumCandidates;
  std::string profile = "peaked";
  auto* synth = app.add_subcommand("synth-table", "Generate a seeded stand-in accuracy table");
  synth->add_option("--layers", synth_layers, "Rows (default 19)");
  synth->add_option("--candidates", synth_candidates, "Columns (default 12)");
  synth->add_option("--profile", profile, "peaked or uniform");

  TableArgs loss_args;
  auto* loss_cmd = app.add_subcommand("loss-table", "Convert a table to the loss domain");
  add_table_options(loss_cmd, loss_args, false);

  TableArgs spec_args;
  GAConfig cfg;
  std::string selection = "pooled";
  std::string log_path;
  auto* spec = app.add_subcommand("specialize", "Genetic search under a cost ceiling");
  add_table_options(spec, spec_args, true);
  spec->add_option("--generations", cfg.generations, "Generations (default 1000)");
  spec->add_option("--population", cfg.population, "Population size, even (default 20)");
  spec->add_option("--mutation", cfg.mutation_prob, "Per-gene mutation probability (default 0.1)");
  spec->add_option("--repair-attempts", cfg.repair_attempts, "Resampling attempts for infeasible children (default 100)");
  spec->add_option("--selection", selection, "pooled or parents_only");
  spec->add_option("--log", log_path, "Write the evolution curve CSV here");

  TableArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive search (small instances only)");
  add_table_options(oracle, oracle_args, true);

  auto* analyze = app.add_subcommand("analyze", "Layer importance, Kendall tau, ablations");
  analyze->require_subcommand(1);
  std::string importance_table;
  auto* importance = analyze->add_subcommand("importance", "Maximum loss per layer");
  importance->add_option("--table", importance_table)->required();
  std::string xs, ys;
  int synthetic_samples = 0;
  auto* kendall = analyze->add_subcommand("kendall", "Kendall tau-b of paired samples");
  kendall->add_option("--xs", xs, "Comma-separated values");
  kendall->add_option("--ys", ys, "Comma-separated values");
  kendall->add_option("--synthetic", synthetic_samples,
                      "Sample N architectures from a seeded synthetic world instead");
  std::string ablation_table;
  auto* ablation = analyze->add_subcommand("ablation-worst", "Worst network and improvements");
  ablation->add_option("--table", ablation_table)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Session session(g, out);
  try {
    if (*cost) return cmd_cost(session, genes_text, expand);
    if (*build) return cmd_build_table(session, evaluator_name, noise);
    if (*synth) return cmd_synth_table(session, synth_layers, synth_candidates, profile);
    if (*loss_cmd) return cmd_loss_table(session, loss_args.table_path);
    if (*spec) return cmd_specialize(session, spec_args, cfg, selection, log_path);
    if (*oracle) return cmd_oracle(session, oracle_args);
    if (*importance) return cmd_importance(session, importance_table);
    if (*kendall) return cmd_kendall(session, xs, ys, synthetic_samples);
    if (*ablation) return cmd_ablation(session, ablation_table);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\ncheapest achievable cost: " << e.cheapest_cost()
        << '\n';
    return kInfeasible;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace ponas::cli
