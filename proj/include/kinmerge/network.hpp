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
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "kinmerge/fundamental_diagram.hpp"
#include "kinmerge/junction.hpp"
#include "kinmerge/kinetic.hpp"
#include "kinmerge/lwr.hpp"

namespace kinmerge::network {

enum class Model { Kinetic, Lwr };

enum class Coupling { KineticFair, KineticPriority, KineticPriorityTruncated, MacroFair, MacroPriority };

enum class CouplingFamily { Fair, Priority };

enum class JunctionEnd { AtLeft, AtRight };

std::string_view to_string(Model m);
std::string_view to_string(Coupling c);
std::string_view to_string(CouplingFamily f);

/// Coupling of the given family that belongs to `model`. Kinetic priority
/// merges are truncated whenever delta > 0.
Coupling paired_coupling(Model model, CouplingFamily family, double delta);
CouplingFamily family_of(Coupling c);
bool is_kinetic(Coupling c);

/// One road on [0,1]. Only the cell array of the running model is populated.
struct RoadGrid {
  std::vector<kinetic::CellState> kinetic_cells;
  std::vector<lwr::ScalarCell> scalar_cells;
  double dx = 0.0;
  JunctionEnd junction_end = JunctionEnd::AtRight;

  std::size_t size() const noexcept {
    return kinetic_cells.empty() ? scalar_cells.size() : kinetic_cells.size();
  }
  double rho(std::size_t i) const {
    return kinetic_cells.empty() ? scalar_cells[i].rho : kinetic_cells[i].rho();
  }
  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx; }
  double mass() const;
  /// Density in the cell touching the junction.
  double junction_trace() const { return rho(junction_end == JunctionEnd::AtRight ? size() - 1 : 0); }
};

/// Roads 0 and 1 feed road 2.
struct MergeNode {
  std::array<int, 2> incoming{0, 1};
  int outgoing = 2;
  Coupling coupling = Coupling::KineticFair;
  double delta = 0.0;
};

struct SimulationConfig {
  Model model = Model::Kinetic;
  Coupling coupling = Coupling::KineticFair;
  double epsilon = 1e-3;
  int cells_per_road = 1000;
  double t_end = 1.0;
  double cfl_number = 0.45;
  double delta = 0.5;
  std::array<double, 3> initial_densities{};
  std::vector<double> snapshot_times;
  FundamentalDiagram diagram = FundamentalDiagram::lwr();
};

/// Throws Config for out-of-range parameters or a coupling from the other model.
void validate(const SimulationConfig& config);

struct NetworkState {
  Model model = Model::Kinetic;
  double epsilon = 1e-3;
  std::array<RoadGrid, 3> roads;
  MergeNode node;
  double time = 0.0;
  long steps = 0;
  double initial_mass = 0.0;
  /// Time integral of mass entering minus leaving through the outer ends.
  double boundary_inflow = 0.0;
  double max_junction_imbalance = 0.0;
  /// Mass fluxes through the junction interfaces during the last step.
  std::array<double, 3> junction_flux{};

  double mass() const;
  /// |mass - initial - inflow| relative to max(initial mass, 1).
  double relative_mass_error() const;
};

NetworkState initialize(const SimulationConfig& config);

/// Largest stable step over all roads for the given CFL number.
double stable_dt(const NetworkState& state, const FundamentalDiagram& d, double cfl_number);

/// One synchronized step of all roads.
void advance(NetworkState& state, double dt, const FundamentalDiagram& d);

struct RoadProfile {
  std::vector<double> x;
  std::vector<double> rho;
  /// Driving-car flux q for kinetic runs, F(rho) for LWR runs.
  std::vector<double> q;
  /// Empty for LWR runs.
  std::vector<double> z;
};

struct Snapshot {
  double requested_time = 0.0;
  double time = 0.0;
  std::array<RoadProfile, 3> roads;
  std::array<double, 3> junction_flux{};
  std::array<double, 3> junction_trace{};
};

struct RunDiagnostics {
  long steps = 0;
  double relative_mass_error = 0.0;
  double max_junction_imbalance = 0.0;
};

struct RunResult {
  SimulationConfig config;
  std::vector<Snapshot> snapshots;
  RunDiagnostics diagnostics;
};

Snapshot take_snapshot(const NetworkState& state, const FundamentalDiagram& d, double requested);

/// Advances to t_end, taking a snapshot at every requested time (t_end alone
/// when none are given). Steps are shortened to land on snapshot times.
RunResult run(const SimulationConfig& config);

} // namespace kinmerge::network
