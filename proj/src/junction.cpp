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

#include "kinmerge/junction.hpp"

#include <algorithm>
#include <sstream>

#include "kinmerge/error.hpp"

namespace kinmerge::junction {

namespace {

constexpr double kRoundOff = 1e-13;

void check_trace(const JunctionTrace& t) {
  auto ok = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!ok(t.z_hat_1) || !ok(t.z_hat_2) || !ok(t.w_hat_3)) {
    std::ostringstream os;
    os << "junction trace (" << t.z_hat_1 << ", " << t.z_hat_2 << ", " << t.w_hat_3
       << ") outside [0,1]^3";
    fail(ErrorCode::Domain, os.str());
  }
}

double unit(double v) {
  if (v < -kRoundOff || v > 1.0 + kRoundOff) {
    std::ostringstream os;
    os << "merge outcome component " << v << " outside [0,1]";
    fail(ErrorCode::InvariantBreach, os.str());
  }
  return std::clamp(v, 0.0, 1.0);
}

KineticMergeOutcome finish(double free_1, double free_2, double z_3, KineticCase label) {
  return {unit(1.0 - unit(free_1)), unit(1.0 - unit(free_2)), unit(z_3), label};
}

} // namespace

std::string_view to_string(KineticCase c) {
  switch (c) {
  case KineticCase::FairRegular: return "FairRegular";
  case KineticCase::FairDegenerate: return "FairDegenerate";
  case KineticCase::PriorityI: return "PriorityI";
  case KineticCase::PriorityII: return "PriorityII";
  case KineticCase::PriorityIII: return "PriorityIII";
  }
  return "?";
}

std::string_view to_string(MacroCase c) {
  switch (c) {
  case MacroCase::A: return "A";
  case MacroCase::B: return "B";
  case MacroCase::C: return "C";
  case MacroCase::D: return "D";
  }
  return "?";
}

KineticMergeOutcome kinetic_fair_merge(const JunctionTrace& t) {
  check_trace(t);
  const double z1 = t.z_hat_1;
  const double z2 = t.z_hat_2;
  const double space = 1.0 - t.w_hat_3;
  const double det = 1.0 - z1 * z2;
  double alpha_1 = 0.5;
  double alpha_2 = 0.5;
  bool degenerate = t.w_hat_3 >= 1.0;
  if (det > 0.0) {
    alpha_1 = (1.0 - z2) / det;
    alpha_2 = (1.0 - z1) / det;
  } else {
    degenerate = true;
  }
  const double z_3 = alpha_1 * z1 + alpha_2 * z2;
  return finish(alpha_1 * space, alpha_2 * space, z_3,
                degenerate ? KineticCase::FairDegenerate : KineticCase::FairRegular);
}

KineticMergeOutcome kinetic_priority_merge(const JunctionTrace& t) {
  check_trace(t);
  const double z1 = t.z_hat_1;
  const double z2 = t.z_hat_2;
  const double w3 = t.w_hat_3;
  const double load = w3 + z1;
  if (1.0 - z2 <= load && load <= 1.0) {
    double free_2 = z2 > 0.0 ? (1.0 - w3 - z1) / z2 : 0.0;
    return finish(1.0, free_2, 1.0, KineticCase::PriorityI);
  }
  if (load >= 1.0) {
    double free_1 = z1 > 0.0 ? (1.0 - w3) / z1 : 0.0;
    return finish(free_1, 0.0, 1.0, KineticCase::PriorityII);
  }
  double z_3 = w3 < 1.0 ? (z1 + z2) / (1.0 - w3) : 0.0;
  return finish(1.0, 1.0, z_3, KineticCase::PriorityIII);
}

KineticMergeOutcome kinetic_priority_merge_truncated(const JunctionTrace& t, double delta,
                                                     const FundamentalDiagram& d) {
  check_trace(t);
  const double bound = delta_bar(d);
  if (!(delta >= 0.0 && delta <= bound)) {
    std::ostringstream os;
    os << "truncation delta = " << delta << " outside [0, " << bound << "]";
    fail(ErrorCode::Domain, os.str());
  }
  const double z1 = t.z_hat_1;
  const double z2 = t.z_hat_2;
  const double w3 = t.w_hat_3;
  const double capacity = (1.0 - w3) * (1.0 - delta);
  if (capacity >= z1 && z1 + z2 >= capacity) {
    double free_2 = z2 > 0.0 ? (capacity - z1) / z2 : 0.0;
    return finish(1.0, free_2, 1.0 - delta, KineticCase::PriorityI);
  }
  if (capacity <= z1) {
    double free_1 = z1 > 0.0 ? capacity / z1 : 0.0;
    return finish(free_1, 0.0, 1.0 - delta, KineticCase::PriorityII);
  }
  double z_3 = w3 < 1.0 ? (z1 + z2) / (1.0 - w3) : 0.0;
  return finish(1.0, 1.0, z_3, KineticCase::PriorityIII);
}

MacroMergeOutcome macro_fair_merge(const FundamentalDiagram& d, double rho_b_1, double rho_b_2,
                                   double rho_b_3) {
  MacroMergeOutcome out;
  const double c1 = demand(d, rho_b_1);
  const double c2 = demand(d, rho_b_2);
  const double c3 = supply(d, rho_b_3);
  out.caps = {c1, c2, c3};
  double C1 = c1;
  double C2 = c2;
  if (c1 + c2 <= c3) {
    out.case_label = MacroCase::A;
  } else {
    const double shortfall = c3 - std::min({c1, c2, 0.5 * c3});
    C1 = std::min(c1, shortfall);
    C2 = std::min(c2, shortfall);
    if (c1 >= 0.5 * c3 && c2 >= 0.5 * c3)
      out.case_label = MacroCase::B;
    else if (c1 >= 0.5 * c3)
      out.case_label = MacroCase::C;
    else
      out.case_label = MacroCase::D;
  }
  out.fluxes = {C1, C2, C1 + C2};
  return out;
}

MacroMergeOutcome macro_priority_merge(const FundamentalDiagram& d, double rho_b_1,
                                       double rho_b_2, double rho_b_3) {
  MacroMergeOutcome out;
  const double c1 = demand(d, rho_b_1);
  const double c2 = demand(d, rho_b_2);
  const double c3 = supply(d, rho_b_3);
  out.caps = {c1, c2, c3};
  double C1 = c1;
  double C2 = c2;
  if (c1 + c2 <= c3) {
    out.case_label = MacroCase::A;
  } else {
    C1 = std::min(c1, c3);
    C2 = std::max(c3 - c1, 0.0);
    out.case_label = c1 >= c3 ? MacroCase::B : MacroCase::C;
  }
  out.fluxes = {C1, C2, C1 + C2};
  return out;
}

GhostStates ghost_states(const JunctionTrace& t, const KineticMergeOutcome& o) {
  return {kinetic::CellState::from_w_z(o.w_1, t.z_hat_1),
          kinetic::CellState::from_w_z(o.w_2, t.z_hat_2),
          kinetic::CellState::from_w_z(t.w_hat_3, o.z_3)};
}

JunctionTrace trace_of(const std::array<kinetic::CellState, 3>& b) {
  return {b[0].z(), b[1].z(), b[2].w()};
}

JunctionFluxes kinetic_junction_fluxes(const std::array<kinetic::CellState, 3>& b,
                                       KineticMode mode, double delta,
                                       const FundamentalDiagram& d) {
  const JunctionTrace t = trace_of(b);
  JunctionFluxes out;
  switch (mode) {
  case KineticMode::Fair: out.outcome = kinetic_fair_merge(t); break;
  case KineticMode::Priority: out.outcome = kinetic_priority_merge(t); break;
  case KineticMode::PriorityTruncated:
    out.outcome = kinetic_priority_merge_truncated(t, delta, d);
    break;
  }
  const GhostStates g = ghost_states(t, out.outcome);
  out.flux[0] = kinetic::godunov_flux(b[0], g.incoming_1);
  out.flux[1] = kinetic::godunov_flux(b[1], g.incoming_2);
  out.flux[2] = kinetic::godunov_flux(g.outgoing_3, b[2]);
  return out;
}

} // namespace kinmerge::junction
