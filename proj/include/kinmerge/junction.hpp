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
#include <string_view>

#include "kinmerge/fundamental_diagram.hpp"
#include "kinmerge/kinetic.hpp"

namespace kinmerge::junction {

/// Known traces at a 2-in/1-out node: Z leaving roads 1 and 2, w leaving road 3.
struct JunctionTrace {
  double z_hat_1 = 0.0;
  double z_hat_2 = 0.0;
  double w_hat_3 = 0.0;
};

enum class KineticCase { FairRegular, FairDegenerate, PriorityI, PriorityII, PriorityIII };

/// Resolved unknowns (w1, w2, Z3) of a kinetic merge.
struct KineticMergeOutcome {
  double w_1 = 0.0;
  double w_2 = 0.0;
  double z_3 = 0.0;
  KineticCase case_label = KineticCase::FairRegular;
};

enum class MacroCase { A, B, C, D };

struct MacroMergeOutcome {
  std::array<double, 3> caps{};   // c1, c2 demands and c3 supply
  std::array<double, 3> fluxes{}; // C1, C2, C3 = C1 + C2
  MacroCase case_label = MacroCase::A;
};

enum class KineticMode { Fair, Priority, PriorityTruncated };

std::string_view to_string(KineticCase c);
std::string_view to_string(MacroCase c);

/// Both incoming roads see the outgoing free space reduced by the other
/// road's driving cars; mass is balanced. Unique for Z1*Z2 != 1; the
/// degenerate corner Z1 = Z2 = 1 uses the symmetric split alpha = 1/2.
KineticMergeOutcome kinetic_fair_merge(const JunctionTrace& trace);

/// Road 1 flows unrestrained as long as road 3 can take it; road 2 fills the rest.
KineticMergeOutcome kinetic_priority_merge(const JunctionTrace& trace);

/// Priority merge with outgoing Z capped at 1 - delta, 0 <= delta <= delta_bar(d).
KineticMergeOutcome kinetic_priority_merge_truncated(const JunctionTrace& trace, double delta,
                                                     const FundamentalDiagram& d);

MacroMergeOutcome macro_fair_merge(const FundamentalDiagram& d, double rho_b_1, double rho_b_2,
                                   double rho_b_3);

MacroMergeOutcome macro_priority_merge(const FundamentalDiagram& d, double rho_b_1,
                                       double rho_b_2, double rho_b_3);

/// Junction-side ghost states built from a kinetic merge outcome.
struct GhostStates {
  kinetic::CellState incoming_1;
  kinetic::CellState incoming_2;
  kinetic::CellState outgoing_3;
};

GhostStates ghost_states(const JunctionTrace& trace, const KineticMergeOutcome& outcome);

/// Fluxes through the three junction interfaces, in road order.
struct JunctionFluxes {
  std::array<kinetic::InterfaceFlux, 3> flux{};
  KineticMergeOutcome outcome;
};

/// Extracts the trace from the junction-adjacent cells (last cells of roads 1
/// and 2, first cell of road 3), resolves the merge and evaluates the Godunov
/// flux against each ghost. `delta` is only read in PriorityTruncated mode.
JunctionFluxes kinetic_junction_fluxes(const std::array<kinetic::CellState, 3>& boundary_states,
                                       KineticMode mode, double delta,
                                       const FundamentalDiagram& d);

JunctionTrace trace_of(const std::array<kinetic::CellState, 3>& boundary_states);

} // namespace kinmerge::junction
