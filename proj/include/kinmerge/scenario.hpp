// Copyright 2026 The kinmerge Authors
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

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kinmerge/network.hpp"

namespace kinmerge::scenario {

struct ScenarioConfig {
  network::SimulationConfig sim;
  network::CouplingFamily family = network::CouplingFamily::Fair;
  std::string output_dir = "out";
};

/// Recognised keys, in documentation order.
const std::vector<std::string_view>& config_keys();

/// Sets one key from its textual value. Throws Parse with the key (and the
/// line number when `line` > 0) on unknown keys or malformed values.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value, int line = 0);

/// Picks the coupling that pairs the model with the family and validates the
/// whole configuration. Throws Config.
void finalize(ScenarioConfig& config);

/// Parses `key = value` lines ('#' starts a comment) and finalizes.
ScenarioConfig parse_config(std::string_view text);

/// Inverse of parse_config for the recognised keys.
std::string render_config(const ScenarioConfig& config);

enum class MarkerSource { Kinetic, Lwr, Comparison };

enum class MarkerKind {
  TraceNear,     // |trace(road) - value| <= tolerance
  TraceAtLeast,  // trace(road) >= value
  FluxNear,      // |junction flux(road) - value| <= tolerance
  FluxAtMost,    // junction flux(road) <= value
  TraceGreater,  // trace(road) > trace(other)
  ShockUpstream, // shock(road) sits at smaller x than shock(other)
  L1Below,       // kinetic-vs-LWR L1 distance on road < value
};

/// Assertion on the final snapshot. Roads are zero-based.
struct Marker {
  MarkerSource source = MarkerSource::Kinetic;
  MarkerKind kind = MarkerKind::TraceNear;
  int road = 0;
  int other = 0;
  double value = 0.0;
  double tolerance = 0.0;
};

std::string describe(const Marker& m);

struct ScenarioPreset {
  std::string name;
  std::array<double, 3> densities{};
  network::CouplingFamily family = network::CouplingFamily::Fair;
  std::string caption;
  std::vector<Marker> markers;
};

const std::vector<ScenarioPreset>& presets();

/// Throws Config for unknown names.
const ScenarioPreset& find_preset(std::string_view name);

/// Default configuration running `preset` with `model`, output below output_dir/<model>.
ScenarioConfig preset_config(const ScenarioPreset& preset, network::Model model);

/// Writes road{r}_snap{k}.csv (r = 1..3) and manifest.json into `dir`.
void emit_snapshots(const network::RunResult& run, const ScenarioConfig& config,
                    const std::filesystem::path& dir);

/// Reads a directory written by emit_snapshots. The diagram is assumed to be LWR.
network::RunResult read_snapshots(const std::filesystem::path& dir);

struct RoadComparison {
  double l1 = 0.0;
  double linf = 0.0;
  double trace_a = 0.0;
  double trace_b = 0.0;
  std::optional<double> shock_a;
  std::optional<double> shock_b;
  /// (shock_b - shock_a) / dx when both runs carry a shock.
  std::optional<double> shock_offset_cells;
};

struct ComparisonReport {
  double time = 0.0;
  std::array<RoadComparison, 3> roads;
};

/// Position of the steepest jump away from both road ends, located at the
/// crossing of the mean of the two adjacent plateaus. Empty without a jump.
std::optional<double> shock_position(const std::vector<double>& x, const std::vector<double>& rho);

/// Compares the final snapshots. Throws Comparison when grids or snapshot times differ.
ComparisonReport compare_runs(const network::RunResult& a, const network::RunResult& b);

struct MarkerResult {
  Marker marker;
  double observed = 0.0;
  bool passed = false;
  bool evaluated = false;
};

/// Evaluates the markers whose inputs are present; the others come back unevaluated.
std::vector<MarkerResult> evaluate_markers(const ScenarioPreset& preset,
                                           const network::RunResult* kinetic,
                                           const network::RunResult* lwr,
                                           const ComparisonReport* comparison);

} // namespace kinmerge::scenario
