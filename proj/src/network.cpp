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

#include "kinmerge/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinmerge/error.hpp"

namespace kinmerge::network {

namespace {

void config_error(const std::string& what) { fail(ErrorCode::Config, what); }

junction::KineticMode kinetic_mode(Coupling c) {
  switch (c) {
  case Coupling::KineticFair: return junction::KineticMode::Fair;
  case Coupling::KineticPriority: return junction::KineticMode::Priority;
  case Coupling::KineticPriorityTruncated: return junction::KineticMode::PriorityTruncated;
  default: break;
  }
  fail(ErrorCode::Config, "macroscopic coupling on a kinetic network");
}

std::vector<double> snapshot_plan(const SimulationConfig& c) {
  std::vector<double> times = c.snapshot_times;
  if (times.empty()) times.push_back(c.t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

} // namespace

std::string_view to_string(Model m) { return m == Model::Kinetic ? "kinetic" : "lwr"; }

std::string_view to_string(Coupling c) {
  switch (c) {
  case Coupling::KineticFair: return "KineticFair";
  case Coupling::KineticPriority: return "KineticPriority";
  case Coupling::KineticPriorityTruncated: return "KineticPriorityTruncated";
  case Coupling::MacroFair: return "MacroFair";
  case Coupling::MacroPriority: return "MacroPriority";
  }
  return "?";
}

std::string_view to_string(CouplingFamily f) { return f == CouplingFamily::Fair ? "fair" : "priority"; }

Coupling paired_coupling(Model model, CouplingFamily family, double delta) {
  if (model == Model::Lwr) return family == CouplingFamily::Fair ? Coupling::MacroFair : Coupling::MacroPriority;
  if (family == CouplingFamily::Fair) return Coupling::KineticFair;
  return delta > 0.0 ? Coupling::KineticPriorityTruncated : Coupling::KineticPriority;
}

CouplingFamily family_of(Coupling c) {
  return c == Coupling::KineticFair || c == Coupling::MacroFair ? CouplingFamily::Fair
                                                                : CouplingFamily::Priority;
}

bool is_kinetic(Coupling c) {
  return c == Coupling::KineticFair || c == Coupling::KineticPriority ||
         c == Coupling::KineticPriorityTruncated;
}

double RoadGrid::mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m += rho(i);
  return m * dx;
}

double NetworkState::mass() const {
  double m = 0.0;
  for (const auto& r : roads) m += r.mass();
  return m;
}

double NetworkState::relative_mass_error() const {
  return std::abs(mass() - initial_mass - boundary_inflow) / std::max(initial_mass, 1.0);
}

void validate(const SimulationConfig& c) {
  std::ostringstream os;
  if (!(c.epsilon > 0.0)) {
    os << "epsilon must be positive, got " << c.epsilon;
    config_error(os.str());
  }
  if (!(c.cfl_number > 0.0 && c.cfl_number < 1.0)) {
    os << "cfl must lie in (0,1), got " << c.cfl_number;
    config_error(os.str());
  }
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) {
    os << "t_end must be non-negative, got " << c.t_end;
    config_error(os.str());
  }
  if (c.cells_per_road < 1) {
    os << "cells must be at least 1, got " << c.cells_per_road;
    config_error(os.str());
  }
  for (int i = 0; i < 3; ++i) {
    double r = c.initial_densities[i];
    if (!(r >= 0.0 && r <= 1.0)) {
      os << "rho" << i + 1 << " = " << r << " outside [0,1]";
      config_error(os.str());
    }
  }
  for (double t : c.snapshot_times) {
    if (!(t >= 0.0 && t <= c.t_end)) {
      os << "snapshot time " << t << " outside [0, t_end]";
      config_error(os.str());
    }
  }
  if ((c.model == Model::Kinetic) != is_kinetic(c.coupling)) {
    os << to_string(c.coupling) << " coupling cannot drive the " << to_string(c.model) << " model";
    config_error(os.str());
  }
  if (c.coupling == Coupling::KineticPriorityTruncated) {
    const double bound = delta_bar(c.diagram);
    if (!(c.delta >= 0.0 && c.delta <= bound)) {
      os << "delta = " << c.delta << " outside [0, " << bound << "]";
      config_error(os.str());
    }
  }
}

NetworkState initialize(const SimulationConfig& c) {
  validate(c);
  NetworkState s;
  s.model = c.model;
  s.epsilon = c.epsilon;
  s.node.coupling = c.coupling;
  s.node.delta = c.delta;
  const double dx = 1.0 / c.cells_per_road;
  for (int r = 0; r < 3; ++r) {
    RoadGrid& g = s.roads[r];
    g.dx = dx;
    g.junction_end = r == s.node.outgoing ? JunctionEnd::AtLeft : JunctionEnd::AtRight;
    const double rho = c.initial_densities[r];
    if (c.model == Model::Kinetic)
      g.kinetic_cells.assign(c.cells_per_road, kinetic::CellState::equilibrium(c.diagram, rho));
    else
      g.scalar_cells.assign(c.cells_per_road, lwr::ScalarCell{rho});
  }
  s.initial_mass = s.mass();
  return s;
}

double stable_dt(const NetworkState& s, const FundamentalDiagram& d, double cfl_number) {
  double speed = 0.0;
  double dx = s.roads[0].dx;
  for (const auto& g : s.roads) {
    dx = std::min(dx, g.dx);
    speed = std::max(speed, s.model == Model::Kinetic ? kinetic::max_wave_speed(g.kinetic_cells)
                                                      : lwr::max_characteristic_speed(d));
  }
  return cfl_number * dx / speed;
}

void advance(NetworkState& s, double dt, const FundamentalDiagram& d) {
  auto& in1 = s.roads[s.node.incoming[0]];
  auto& in2 = s.roads[s.node.incoming[1]];
  auto& out = s.roads[s.node.outgoing];
  std::array<double, 3> jf{};
  double inflow = 0.0;

  if (s.model == Model::Kinetic) {
    using kinetic::godunov_flux;
    const auto j = junction::kinetic_junction_fluxes(
        {in1.kinetic_cells.back(), in2.kinetic_cells.back(), out.kinetic_cells.front()},
        kinetic_mode(s.node.coupling), s.node.delta, d);
    const auto e1 = godunov_flux(in1.kinetic_cells.front(), in1.kinetic_cells.front());
    const auto e2 = godunov_flux(in2.kinetic_cells.front(), in2.kinetic_cells.front());
    const auto e3 = godunov_flux(out.kinetic_cells.back(), out.kinetic_cells.back());
    in1.kinetic_cells = kinetic::transport_step(in1.kinetic_cells, e1, j.flux[0], dt, in1.dx);
    in2.kinetic_cells = kinetic::transport_step(in2.kinetic_cells, e2, j.flux[1], dt, in2.dx);
    out.kinetic_cells = kinetic::transport_step(out.kinetic_cells, j.flux[2], e3, dt, out.dx);
    for (auto* g : {&in1, &in2, &out})
      for (auto& cell : g->kinetic_cells) cell = kinetic::relax_exact(cell, dt, s.epsilon, d);
    jf = {j.flux[0].mass_flux, j.flux[1].mass_flux, j.flux[2].mass_flux};
    inflow = e1.mass_flux + e2.mass_flux - e3.mass_flux;
  } else {
    if (is_kinetic(s.node.coupling)) fail(ErrorCode::Config, "kinetic coupling on an LWR network");
    const auto merge = s.node.coupling == Coupling::MacroFair ? &junction::macro_fair_merge
                                                              : &junction::macro_priority_merge;
    const auto m = merge(d, in1.scalar_cells.back().rho, in2.scalar_cells.back().rho,
                         out.scalar_cells.front().rho);
    const double e1 = d.flux(in1.scalar_cells.front().rho);
    const double e2 = d.flux(in2.scalar_cells.front().rho);
    const double e3 = d.flux(out.scalar_cells.back().rho);
    in1.scalar_cells = lwr::scalar_step(d, in1.scalar_cells, e1, m.fluxes[0], dt, in1.dx);
    in2.scalar_cells = lwr::scalar_step(d, in2.scalar_cells, e2, m.fluxes[1], dt, in2.dx);
    out.scalar_cells = lwr::scalar_step(d, out.scalar_cells, m.fluxes[2], e3, dt, out.dx);
    jf = m.fluxes;
    inflow = e1 + e2 - e3;
  }
  s.junction_flux = jf;
  s.max_junction_imbalance = std::max(s.max_junction_imbalance, std::abs(jf[2] - jf[0] - jf[1]));
  s.boundary_inflow += dt * inflow;
  s.time += dt;
  ++s.steps;
}

Snapshot take_snapshot(const NetworkState& s, const FundamentalDiagram& d, double requested) {
  Snapshot snap;
  snap.requested_time = requested;
  snap.time = s.time;
  snap.junction_flux = s.junction_flux;
  for (int r = 0; r < 3; ++r) {
    const RoadGrid& g = s.roads[r];
    RoadProfile& p = snap.roads[r];
    const std::size_t n = g.size();
    p.x.resize(n);
    p.rho.resize(n);
    p.q.resize(n);
    if (s.model == Model::Kinetic) p.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.x[i] = g.center(i);
      p.rho[i] = g.rho(i);
      if (s.model == Model::Kinetic) {
        p.q[i] = g.kinetic_cells[i].q();
        p.z[i] = g.kinetic_cells[i].z();
      } else {
        p.q[i] = d.flux(p.rho[i]);
      }
    }
    snap.junction_trace[r] = g.junction_trace();
  }
  return snap;
}

RunResult run(const SimulationConfig& config) {
  NetworkState state = initialize(config);
  const FundamentalDiagram& d = config.diagram;
  RunResult result;
  result.config = config;
  const std::vector<double> plan = snapshot_plan(config);
  std::size_t next = 0;
  auto record_due = [&] {
    while (next < plan.size() && plan[next] <= state.time) {
      result.snapshots.push_back(take_snapshot(state, d, plan[next]));
      ++next;
    }
  };
  record_due();
  while (state.time < config.t_end) {
    double dt = stable_dt(state, d, config.cfl_number);
    double target = next < plan.size() ? plan[next] : config.t_end;
    if (state.time + dt >= target) {
      dt = target - state.time;
      advance(state, dt, d);
      state.time = target;
    } else {
      advance(state, dt, d);
    }
    record_due();
  }
  result.diagnostics = {state.steps, state.relative_mass_error(), state.max_junction_imbalance};
  return result;
}

} // namespace kinmerge::network
