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

#include "kinmerge/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinmerge/error.hpp"

namespace kinmerge::kinetic {

namespace {

double clamp_unit(double v, double tol, const char* what, std::size_t cell) {
  if (v < -tol || v > 1.0 + tol) {
    std::ostringstream os;
    os << "invariant region breached in cell " << cell << ": " << what << " = " << v;
    fail(ErrorCode::InvariantBreach, os.str());
  }
  return std::clamp(v, 0.0, 1.0);
}

} // namespace

CellState CellState::from_rho_q(double rho, double q) {
  if (!(q >= 0.0 && q <= rho && rho <= 1.0)) {
    std::ostringstream os;
    os << "state (rho=" << rho << ", q=" << q << ") outside 0 <= q <= rho <= 1";
    fail(ErrorCode::Domain, os.str());
  }
  return CellState(rho - q, q);
}

CellState CellState::from_w_z(double w, double z) {
  if (!(w >= 0.0 && w <= 1.0 && z >= 0.0 && z <= 1.0))
    fail(ErrorCode::Domain, "Riemann invariants (w, Z) must lie in [0,1]");
  return CellState(w, z * (1.0 - w));
}

CellState CellState::from_rho_z(double rho, double z) {
  if (!(z >= 0.0 && z <= rho && rho <= 1.0)) {
    std::ostringstream os;
    os << "state (rho=" << rho << ", Z=" << z << ") outside 0 <= Z <= rho <= 1";
    fail(ErrorCode::Domain, os.str());
  }
  if (z >= 1.0) return CellState(1.0, 0.0);
  double q = std::min(z * (1.0 - rho) / (1.0 - z), rho);
  return CellState(rho - q, q);
}

CellState CellState::equilibrium(const FundamentalDiagram& d, double rho) {
  return from_rho_q(rho, std::clamp(d.flux(rho), 0.0, rho));
}

std::pair<double, double> eigenvalues(const CellState& s) {
  double gap = 1.0 - s.rho();
  // Z = 1 (including the stopped jam f0 = 1) gets the CFL sentinel.
  if (gap <= s.q() * kLambdaGuard) return {-1.0 / kLambdaGuard, 1.0};
  return {-s.q() / gap, 1.0};
}

CellState interface_state(const CellState& left, const CellState& right) {
  return CellState::from_w_z(right.w(), left.z());
}

InterfaceFlux godunov_flux(const CellState& left, const CellState& right) {
  double z = left.z();
  return {z * (1.0 - right.w()), z};
}

CellState relax_exact(const CellState& s, double dt, double epsilon, const FundamentalDiagram& d) {
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "relax_exact: epsilon must be positive");
  if (!(dt >= 0.0)) fail(ErrorCode::InvalidArgument, "relax_exact: dt must be non-negative");
  double rho = s.rho();
  double eq = std::clamp(d.flux(rho), 0.0, rho);
  double q = eq + (s.q() - eq) * std::exp(-dt / epsilon);
  return CellState::from_rho_q(rho, std::clamp(q, 0.0, rho));
}

double max_wave_speed(std::span<const CellState> cells) {
  double speed = 1.0;
  for (const auto& c : cells) speed = std::max(speed, -eigenvalues(c).first);
  return speed;
}

std::vector<CellState> transport_step(std::span<const CellState> cells, const InterfaceFlux& left,
                                      const InterfaceFlux& right, double dt, double dx) {
  if (!(dx > 0.0) || !(dt >= 0.0)) fail(ErrorCode::InvalidArgument, "transport_step: bad dt or dx");
  const double limit = dx / max_wave_speed(cells);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violated: dt = " << dt << " exceeds dx / max wave speed = " << limit;
    fail(ErrorCode::StepSize, os.str());
  }
  const std::size_t n = cells.size();
  const double ratio = dt / dx;
  // Steps cut down by the jam sentinel can still push about 2 dt/dx across a jam front.
  const double tol = ratio <= kLambdaGuard ? kClampTol + 2.0 * ratio : kClampTol;
  std::vector<CellState> out(n);
  InterfaceFlux west = left;
  for (std::size_t i = 0; i < n; ++i) {
    InterfaceFlux east = i + 1 < n ? godunov_flux(cells[i], cells[i + 1]) : right;
    double rho = cells[i].rho() - ratio * (east.mass_flux - west.mass_flux);
    double z = cells[i].z() - ratio * (east.z_flux - west.z_flux);
    rho = clamp_unit(rho, tol, "rho", i);
    z = clamp_unit(z, tol, "Z", i);
    if (z > rho) {
      if (z - rho > tol) {
        std::ostringstream os;
        os << "invariant region breached in cell " << i << ": Z = " << z << " > rho = " << rho;
        fail(ErrorCode::InvariantBreach, os.str());
      }
      z = rho;
    }
    out[i] = CellState::from_rho_z(rho, z);
    west = east;
  }
  return out;
}

std::vector<CellState> transport_step(std::span<const CellState> cells,
                                      const CellState& left_ghost, const CellState& right_ghost,
                                      double dt, double dx) {
  if (cells.empty()) return {};
  return transport_step(cells, godunov_flux(left_ghost, cells.front()),
                        godunov_flux(cells.back(), right_ghost), dt, dx);
}

} // namespace kinmerge::kinetic
