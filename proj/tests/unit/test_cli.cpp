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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "ponas/accuracy_table.hpp"
#include "ponas/specializer.hpp"

using namespace ponas;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return std::string(PONAS_FIXTURE_DIR) + "/" + name; }

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ponas_cli_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string synthetic_table_file() {
  const auto path = tmp("synth_table.json").string();
  save_table(path, synth_table(3, 19, 12));
  return path;
}

}  // namespace

TEST_CASE("cost command") {
  auto r = run({"cost", "--genes", "largest"});
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["flops"] == 708'804'992);
  CHECK(doc["params"] == 15'331'256);
  CHECK(doc["flops_m"] == 708.8);
  CHECK(doc["tool_version"].is_string());
  CHECK(doc["seed"] == 42);
  CHECK(doc["command"] == "cost");

  r = run({"cost", "--genes", "smallest"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["flops"] == 315'629'504);

  r = run({"cost", "--genes", "0,1,2,3,4,5,6,7,8,9,10,11,0,1,2,3,4,5,6", "--expand"});
  REQUIRE(r.code == 0);
  doc = json::parse(r.out);
  CHECK(doc["architecture"]["slots"].size() == 19);
  CHECK(doc["architecture"]["genes"][11] == 11);

  r = run({"cost", "--genes", "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0", "--format", "json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("expected 19") != std::string::npos);

  CHECK(run({"cost", "--genes", "a,b"}).code == 2);
  CHECK(run({"cost", "--genes", "12,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"}).code == 2);
  CHECK(run({"cost"}).code == 2);
  CHECK(run({"cost", "--genes", "largest", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);

  r = run({"cost", "--genes", "smallest", "--format", "csv"});
  CHECK(r.out == "flops,params\n315629504,4437128\n");
}

TEST_CASE("build-table command") {
  const auto a = run({"build-table", "--seed", "9"});
  const auto b = run({"--seed", "9", "build-table", "--threads", "3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto doc = json::parse(a.out);
  CHECK(doc["evaluations"] == 228);
  CHECK(doc["seed"] == 9);
  CHECK(doc["schedule"]["meta_epochs"] == 50);
  CHECK(doc["best_genes"].size() == 19);
  const auto table = table_from_json(doc["table"]);
  for (int l = 0; l < 19; ++l) CHECK(doc["best_genes"][static_cast<std::size_t>(l)] == row_best(table, l));

  CHECK(run({"build-table", "--seed", "10"}).out != a.out);
  CHECK(run({"build-table", "--evaluator", "imagenet"}).code == 2);
}

TEST_CASE("specialize command") {
  const auto table = synthetic_table_file();

  SUBCASE("deterministic, with log and manifest copy") {
    const auto log = tmp("evo.csv").string();
    const auto manifest = tmp("manifest.json").string();
    const std::vector<std::string> args = {"specialize", "--table", table, "--metric", "flops",
                                           "--ceiling", "340000000", "--generations", "50",
                                           "--seed", "3", "--log", log, "--out", manifest};
    const auto a = run(args);
    REQUIRE(a.code == 0);
    CHECK(run(args).out == a.out);
    const auto doc = json::parse(a.out);
    CHECK(doc["genes"].size() == 19);
    CHECK(doc["flops"].get<std::int64_t>() <= 340'000'000);
    CHECK(doc["generations"] == 50);
    CHECK(doc["seed"] == 3);
    CHECK_FALSE(doc.contains("wall_clock_s"));
    const auto saved = json::parse(slurp(manifest));
    CHECK(saved["wall_clock_s"].is_number());
    CHECK(saved["genes"] == doc["genes"]);

    const std::string csv = slurp(log);
    CHECK(csv.rfind("generation,best_loss,mean_loss\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);
  }

  SUBCASE("huge ceiling returns the zero-loss genes") {
    const auto r = run({"specialize", "--table", table, "--ceiling", "4611686018427387904"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["loss"] == 0.0);
    const auto t = load_table(table);
    for (int l = 0; l < 19; ++l) CHECK(doc["genes"][static_cast<std::size_t>(l)] == row_best(t, l));
  }

  SUBCASE("infeasible ceiling") {
    const auto r = run({"specialize", "--table", table, "--ceiling", "315629503"});
    CHECK(r.code == 3);
    CHECK(r.err.find("315629504") != std::string::npos);
  }

  SUBCASE("errors") {
    CHECK(run({"specialize", "--table", tmp("missing.json").string(), "--ceiling", "1"}).code == 4);
    CHECK(run({"specialize", "--table", table, "--ceiling", "0"}).code == 2);
    CHECK(run({"specialize", "--table", table, "--ceiling", "5", "--metric", "latency"}).code == 2);
    CHECK(run({"specialize", "--table", table, "--ceiling", "400000000", "--population", "7"}).code == 2);
    const auto bad = tmp("bad.json").string();
    write_text_file(bad, R"({"format":"ponas-acc-table-v1","layers":1,"candidates":1,"values":[[2]]})");
    CHECK(run({"specialize", "--table", bad, "--ceiling", "400000000"}).code == 5);
    // 4x3 table against the 19x12 default macro
    CHECK(run({"specialize", "--table", fixture("table_4x3.json"), "--ceiling", "400000000"}).code == 5);
  }

  SUBCASE("csv prints the evolution curve") {
    const auto r = run({"specialize", "--table", table, "--ceiling", "400000000", "--generations",
                        "10", "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("generation,best_loss,mean_loss\n", 0) == 0);
  }
}

TEST_CASE("oracle and specialize agree on the 4x3 fixture") {
  const std::vector<std::string> common = {"--table", fixture("table_4x3.json"), "--costs",
                                           fixture("costs_4x3.json"), "--ceiling", "100"};
  std::vector<std::string> oracle_args = {"oracle"};
  oracle_args.insert(oracle_args.end(), common.begin(), common.end());
  std::vector<std::string> ga_args = {"specialize"};
  ga_args.insert(ga_args.end(), common.begin(), common.end());

  const auto o = run(oracle_args);
  const auto g = run(ga_args);
  REQUIRE(o.code == 0);
  REQUIRE(g.code == 0);
  const auto od = json::parse(o.out);
  const auto gd = json::parse(g.out);
  // Solved by enumerating all 81 chromosomes.
  CHECK(od["genes"] == json::array({1, 2, 2, 1}));
  CHECK(od["cost"] == 93);
  CHECK(od["loss"].get<double>() == doctest::Approx(0.033).epsilon(1e-9));
  CHECK(gd["genes"] == od["genes"]);
  CHECK(gd["loss"] == od["loss"]);

  auto infeasible = oracle_args;
  infeasible.back() = "64";
  CHECK(run(infeasible).code == 3);

  const auto big = run({"oracle", "--table", synthetic_table_file(), "--ceiling", "400000000"});
  CHECK(big.code == 2);
}

TEST_CASE("loss-table command") {
  const auto r = run({"loss-table", "--table", fixture("table_4x3.json")});
  REQUIRE(r.code == 0);
  const auto loss = loss_table_from_json(json::parse(r.out));
  CHECK(loss.has_zero_in_every_row());
  CHECK(loss.at(0, 2) == doctest::Approx(0.022));

  // A loss table is accepted as input as well.
  const auto path = tmp("loss.json").string();
  write_text_file(path, r.out);
  CHECK(run({"loss-table", "--table", path}).out == r.out);

  const auto csv = run({"loss-table", "--table", fixture("table_4x3.json"), "--format", "csv"});
  CHECK(csv.out.rfind("0.000000,0.007000,0.022000\n", 0) == 0);
}

TEST_CASE("analyze commands") {
  auto r = run({"analyze", "kendall", "--xs", "1,2,3", "--ys", "3,2,1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "-1.000000\n");
  r = run({"analyze", "kendall", "--xs", "1,2,3", "--ys", "3,2,1"});
  CHECK(json::parse(r.out)["tau_fixed"] == "-1.000000");
  CHECK(json::parse(r.out)["tau"] == -1.0);
  CHECK(run({"analyze", "kendall", "--xs", "1,1,1", "--ys", "3,2,1"}).code == 5);
  CHECK(run({"analyze", "kendall", "--xs", "1,2", "--ys", "3,2,1"}).code == 2);
  CHECK(run({"analyze", "kendall"}).code == 2);
  CHECK(run({"analyze"}).code == 2);

  r = run({"analyze", "kendall", "--synthetic", "6", "--seed", "42"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["samples"].size() == 6);
  CHECK(json::parse(r.out)["tau"].get<double>() <= -0.6);

  r = run({"analyze", "importance", "--table", fixture("table_4x3.json"), "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "layer,max_loss\n0,0.022000\n1,0.017000\n2,0.017000\n3,0.015000\n");

  r = run({"analyze", "ablation-worst", "--table", synthetic_table_file()});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  for (const char* key : {"worst", "worst_plus_least", "worst_plus_most"}) {
    CHECK(doc[key]["genes"].size() == 19);
    CHECK(doc[key]["flops"].is_number_integer());
  }
  CHECK(doc["worst_plus_most"]["loss"].get<double>() <= doc["worst_plus_least"]["loss"].get<double>());
}

TEST_CASE("synth-table round-trips through files") {
  const auto path = tmp("synth.json").string();
  const auto r = run({"synth-table", "--seed", "4", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(load_table(path) == synth_table(4, 19, 12));
  CHECK(run({"synth-table", "--profile", "spiky"}).code == 2);
}
