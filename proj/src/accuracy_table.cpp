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

#include "ponas/accuracy_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "ponas/error.hpp"
#include "ponas/rng.hpp"

namespace ponas {
namespace {

std::string cell_name(int layer, int candidate) {
  return "(" + std::to_string(layer) + ", " + std::to_string(candidate) + ")";
}

void check_dims(int layers, int candidates, std::size_t size) {
  if (layers < 1 || candidates < 1) {
    throw ValidationError("table dimensions must be positive, got " + std::to_string(layers) +
                          "x" + std::to_string(candidates));
  }
  if (size != static_cast<std::size_t>(layers) * static_cast<std::size_t>(candidates)) {
    throw ValidationError("dimension mismatch: " + std::to_string(size) + " values for a " +
                          std::to_string(layers) + "x" + std::to_string(candidates) + " table");
  }
}

template <typename Table>
int argbest(const Table& t, int layer, bool want_max) {
  if (layer < 0 || layer >= t.layers()) {
    throw UsageError("layer " + std::to_string(layer) + " outside [0, " +
                     std::to_string(t.layers()) + ")");
  }
  const auto row = t.row(layer);
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (want_max ? row[i] > row[best] : row[i] < row[best]) best = i;
  }
  return static_cast<int>(best);
}

struct ParsedMatrix {
  int layers;
  int candidates;
  std::vector<double> values;
};

ParsedMatrix parse_matrix(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("malformed table: expected a JSON object");
  if (!doc.contains("format") || doc["format"] != kTableFormat) {
    throw ValidationError("malformed table: \"format\" must be \"" + std::string(kTableFormat) +
                          "\"");
  }
  for (const char* key : {"layers", "candidates"}) {
    if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<int>() < 1) {
      throw ValidationError(std::string("malformed table: \"") + key +
                            "\" must be a positive integer");
    }
  }
  if (!doc.contains("values") || !doc["values"].is_array()) {
    throw ValidationError("malformed table: \"values\" must be an array of rows");
  }
  ParsedMatrix m{doc["layers"].get<int>(), doc["candidates"].get<int>(), {}};
  const auto& rows = doc["values"];
  if (static_cast<int>(rows.size()) != m.layers) {
    throw ValidationError("dimension mismatch: " + std::to_string(rows.size()) +
                          " rows, header says " + std::to_string(m.layers));
  }
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (!rows[l].is_array() || static_cast<int>(rows[l].size()) != m.candidates) {
      throw ValidationError("dimension mismatch: row " + std::to_string(l) + " must hold " +
                            std::to_string(m.candidates) + " values");
    }
    for (const auto& v : rows[l]) {
      if (!v.is_number()) throw ValidationError("malformed table: non-numeric entry in row " +
                                                std::to_string(l));
      m.values.push_back(v.get<double>());
    }
  }
  return m;
}

nlohmann::json matrix_json(int layers, int candidates, std::span<const double> values) {
  auto rows = nlohmann::json::array();
  for (int l = 0; l < layers; ++l) {
    auto begin = values.begin() + static_cast<std::ptrdiff_t>(l) * candidates;
    rows.push_back(std::vector<double>(begin, begin + candidates));
  }
  nlohmann::json doc;
  doc["format"] = kTableFormat;
  doc["layers"] = layers;
  doc["candidates"] = candidates;
  doc["values"] = std::move(rows);
  return doc;
}

}  // namespace

AccuracyTable::AccuracyTable(int layers, int candidates, std::vector<double> values)
    : layers_(layers), candidates_(candidates), values_(std::move(values)) {
  check_dims(layers_, candidates_, values_.size());
  for (int l = 0; l < layers_; ++l) {
    for (int i = 0; i < candidates_; ++i) {
      const double v = at(l, i);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("accuracy out of range [0, 1] at " + cell_name(l, i) + ": " +
                              std::to_string(v));
      }
    }
  }
}

std::span<const double> AccuracyTable::row(int layer) const {
  return std::span<const double>(values_).subspan(
      static_cast<std::size_t>(layer * candidates_), static_cast<std::size_t>(candidates_));
}

AccuracyLossTable::AccuracyLossTable(int layers, int candidates, std::vector<double> deltas)
    : layers_(layers), candidates_(candidates), deltas_(std::move(deltas)) {
  check_dims(layers_, candidates_, deltas_.size());
  for (int l = 0; l < layers_; ++l) {
    for (int i = 0; i < candidates_; ++i) {
      const double v = at(l, i);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError("accuracy loss must be finite and non-negative at " +
                              cell_name(l, i) + ": " + std::to_string(v));
      }
    }
  }
}

std::span<const double> AccuracyLossTable::row(int layer) const {
  return std::span<const double>(deltas_).subspan(
      static_cast<std::size_t>(layer * candidates_), static_cast<std::size_t>(candidates_));
}

bool AccuracyLossTable::has_zero_in_every_row() const {
  for (int l = 0; l < layers_; ++l) {
    const auto r = row(l);
    if (std::find(r.begin(), r.end(), 0.0) == r.end()) return false;
  }
  return true;
}

AccuracyLossTable to_loss_domain(const AccuracyTable& table) {
  std::vector<double> deltas;
  deltas.reserve(table.values().size());
  for (int l = 0; l < table.layers(); ++l) {
    const auto r = table.row(l);
    const double best = *std::max_element(r.begin(), r.end());
    for (double v : r) deltas.push_back(best - v);
  }
  return AccuracyLossTable(table.layers(), table.candidates(), std::move(deltas));
}

int row_best(const AccuracyTable& table, int layer) { return argbest(table, layer, true); }
int row_best(const AccuracyLossTable& loss, int layer) { return argbest(loss, layer, false); }
int row_worst(const AccuracyLossTable& loss, int layer) { return argbest(loss, layer, true); }

std::vector<double> layer_importance(const AccuracyLossTable& loss) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(loss.layers()));
  for (int l = 0; l < loss.layers(); ++l) {
    const auto r = loss.row(l);
    out.push_back(*std::max_element(r.begin(), r.end()));
  }
  return out;
}

double quantize_accuracy(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return std::strtod(buf, nullptr);
}

SynthProfile parse_synth_profile(std::string_view name) {
  if (name == "peaked") return SynthProfile::kPeaked;
  if (name == "uniform") return SynthProfile::kUniform;
  throw UsageError("unknown table profile '" + std::string(name) +
                   "' (expected peaked or uniform)");
}

AccuracyTable synth_table(std::uint64_t seed, int layers, int candidates,
                          SynthProfile profile) {
  if (layers < 1 || candidates < 1) {
    throw UsageError("synthetic table needs at least one layer and one candidate");
  }
  Rng rng(seed);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(layers) * static_cast<std::size_t>(candidates));
  const double width = std::max(candidates - 1, 1);
  for (int l = 0; l < layers; ++l) {
    const int preferred = static_cast<int>(rng.below(static_cast<std::uint64_t>(candidates)));
    const double base = rng.uniform(0.60, 0.75);
    const double spread = rng.uniform(0.002, 0.04);
    for (int i = 0; i < candidates; ++i) {
      double v;
      if (profile == SynthProfile::kPeaked) {
        const double distance = std::abs(i - preferred) / width;
        const double noise = rng.uniform(-0.005, 0.005);
        v = base - spread * (1.0 - std::exp(-3.0 * distance)) + noise;
      } else {
        v = rng.uniform(0.60, 0.75);
      }
      values.push_back(quantize_accuracy(std::clamp(v, 0.0, 1.0)));
    }
  }
  return AccuracyTable(layers, candidates, std::move(values));
}

nlohmann::json to_json(const AccuracyTable& table) {
  return matrix_json(table.layers(), table.candidates(), table.values());
}

nlohmann::json to_json(const AccuracyLossTable& loss) {
  auto doc = matrix_json(loss.layers(), loss.candidates(), loss.values());
  doc["domain"] = "loss";
  return doc;
}

AccuracyTable table_from_json(const nlohmann::json& doc) {
  if (doc.is_object() && doc.contains("domain") && doc["domain"] != "accuracy") {
    throw ValidationError("expected an accuracy table, got domain " + doc["domain"].dump());
  }
  auto m = parse_matrix(doc);
  return AccuracyTable(m.layers, m.candidates, std::move(m.values));
}

AccuracyLossTable loss_table_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("domain") || doc["domain"] != "loss") {
    throw ValidationError("malformed loss table: \"domain\" must be \"loss\"");
  }
  auto m = parse_matrix(doc);
  return AccuracyLossTable(m.layers, m.candidates, std::move(m.values));
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

AccuracyTable load_table(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  try {
    return table_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_table(const std::filesystem::path& path, const AccuracyTable& table) {
  write_text_file(path, to_json(table).dump(2) + "\n");
}

}  // namespace ponas
