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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ponas/analysis.hpp"
#include "ponas/error.hpp"
#include "ponas/rng.hpp"

using namespace ponas;

namespace {

// Reference tau-b through explicit pair signs, written separately from the
// library's counting loop.
double reference_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  auto sign = [](double v) { return (v > 0) - (v < 0); };
  double s = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      const int a = sign(x[i] - x[j]);
      const int b = sign(y[i] - y[j]);
      s += a * b;
      nx += a * a;
      ny += b * b;
    }
  }
  return s / std::sqrt(nx * ny);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("kendall tau examples") {
  CHECK(kendall_tau({{1, 2, 3}, {10, 20, 30}}) == 1.0);
  CHECK(kendall_tau({{1, 2, 3}, {3, 2, 1}}) == -1.0);
  CHECK(kendall_tau({{1, 2, 3}, {2, 1, 3}}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("kendall tau with ties") {
  // Pairs: (1,2) tie in x; (1,3) C; (2,3) C; P=3, Tx=1, Ty=0.
  CHECK(kendall_tau({{1, 1, 2}, {1, 2, 3}}) == doctest::Approx(2.0 / std::sqrt(2.0 * 3.0)));
  CHECK_THROWS_AS(kendall_tau({{1, 1, 1}, {1, 2, 3}}), ValidationError);
  CHECK_THROWS_AS(kendall_tau({{1, 2, 3}, {4, 4, 4}}), ValidationError);
  CHECK_THROWS_AS(PairedSamples({1}, {1}), UsageError);
  CHECK_THROWS_AS(PairedSamples({1, 2}, {1}), UsageError);
}

TEST_CASE("property: kendall tau") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(8));
      y[i] = static_cast<double>(rng.below(8));
    }
    const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (x_const || y_const) continue;

    const double tau = kendall_tau({x, y});
    CHECK(tau >= -1.0);
    CHECK(tau <= 1.0);
    CHECK(tau == doctest::Approx(reference_tau_b(x, y)).epsilon(1e-12));

    // Strictly monotone transforms change nothing.
    std::vector<double> tx(n), ty(n);
    for (std::size_t i = 0; i < n; ++i) {
      tx[i] = std::exp(x[i]);
      ty[i] = 3.0 * y[i] - 7.0;
    }
    CHECK(kendall_tau({tx, ty}) == doctest::Approx(tau).epsilon(1e-12));

    // Reversing the ranks of y flips the sign.
    std::vector<double> ry(n);
    for (std::size_t i = 0; i < n; ++i) ry[i] = -y[i];
    CHECK(kendall_tau({x, ry}) == doctest::Approx(-tau).epsilon(1e-12));
  }
}

TEST_CASE("importance CSV") {
  CHECK(importance_csv(AccuracyLossTable(2, 2, {0, 0.02, 0.01, 0})) ==
        "layer,max_loss\n0,0.020000\n1,0.010000\n");
  CHECK(importance_csv(to_loss_domain(AccuracyTable(3, 2, std::vector<double>(6, 0.7)))) ==
        "layer,max_loss\n0,0.000000\n1,0.000000\n2,0.000000\n");
}

TEST_CASE("evolution CSV and exports") {
  const auto loss = to_loss_domain(synth_table(3, 19, 12));
  GAConfig cfg;
  cfg.generations = 25;
  const auto r = specialize(loss, Constraint(CostMetric::kFlops, 400'000'000), default_macro(), cfg);
  const std::string csv = evolution_csv(r.log);
  CHECK(csv.rfind("generation,best_loss,mean_loss\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(csv.find("\n25,") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path();
  export_evolution(r.log, dir / "ponas_evolution.csv");
  CHECK(slurp(dir / "ponas_evolution.csv") == csv);
  export_importance(loss, dir / "ponas_importance.csv");
  CHECK(slurp(dir / "ponas_importance.csv") == importance_csv(loss));
  CHECK_THROWS_WITH_AS(export_importance(loss, "/nonexistent_dir/x.csv"),
                       doctest::Contains("/nonexistent_dir/x.csv"), IoError);
}

TEST_CASE("fixed formatting") {
  CHECK(format_fixed6(-1.0) == "-1.000000");
  CHECK(format_fixed6(1.0 / 3.0) == "0.333333");
  CHECK(format_fixed6(-1e-12) == "0.000000");
}
