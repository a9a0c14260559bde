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

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "kinmerge/fundamental_diagram.hpp"

namespace kinmerge::kinetic {

/// One cell of the two-velocity model, stored as (stopped, driving) densities.
///
/// The invariant region is the simplex f0, f1 >= 0, f0 + f1 <= 1. All other
/// representations are views: rho = f0 + f1, q = f1, w = f0 and
/// Z = f1 / (1 - f0), with Z := 1 on the fully stopped state f0 = 1.
class CellState {
public:
  CellState() = default;

  /// Throws Domain unless 0 <= q <= rho <= 1.
  static CellState from_rho_q(double rho, double q);
  /// Builds the state carrying invariants (w, Z); always in the region for w, Z in [0,1].
  static CellState from_w_z(double w, double z);
  /// Inverse of the conservative variables (rho, Z); needs 0 <= Z <= rho <= 1.
  static CellState from_rho_z(double rho, double z);
  /// Equilibrium state q = F(rho).
  static CellState equilibrium(const FundamentalDiagram& d, double rho);

  double f0() const noexcept { return f0_; }
  double f1() const noexcept { return f1_; }
  double rho() const noexcept { return f0_ + f1_; }
  double q() const noexcept { return f1_; }
  double w() const noexcept { return f0_; }
  double z() const noexcept { return f0_ >= 1.0 ? 1.0 : std::min(1.0, f1_ / (1.0 - f0_)); }

  bool in_region(double tol = 0.0) const noexcept {
    return f0_ >= -tol && f1_ >= -tol && f0_ + f1_ <= 1.0 + tol;
  }

private:
  CellState(double f0, double f1) : f0_(f0), f1_(f1) {}

  double f0_ = 0.0;
  double f1_ = 0.0;
};

/// Numerical flux of (rho, Z) through one interface.
struct InterfaceFlux {
  double mass_flux = 0.0;
  double z_flux = 0.0;
};

/// lambda_1 = -q/(1-rho) replaces 1/(1 - Z) by this guard when Z reaches 1.
inline constexpr double kLambdaGuard = 1e-12;
/// Round-off band tolerated (and clamped) when leaving the invariant region.
inline constexpr double kClampTol = 1e-13;

/// (lambda_1, lambda_2) = (-q/(1-rho), 1).
std::pair<double, double> eigenvalues(const CellState& s);

/// Middle state of the two-contact Riemann fan, sampled at the interface:
/// it carries Z of the left state and w of the right state.
CellState interface_state(const CellState& left, const CellState& right);

InterfaceFlux godunov_flux(const CellState& left, const CellState& right);

/// Exact solution of dq/dt = -(q - F(rho))/epsilon at frozen rho.
CellState relax_exact(const CellState& s, double dt, double epsilon, const FundamentalDiagram& d);

/// Largest wave speed seen by the interfaces to the right of `cells`.
double max_wave_speed(std::span<const CellState> cells);

/// First-order conservative update of (rho, Z) with prescribed boundary fluxes.
/// Throws StepSize when dt exceeds the CFL bound and InvariantBreach when a
/// cell leaves the invariant region by more than kClampTol (2 dt/dx more on steps
/// limited by the jam sentinel).
std::vector<CellState> transport_step(std::span<const CellState> cells, const InterfaceFlux& left,
                                      const InterfaceFlux& right, double dt, double dx);

/// Same update with boundary fluxes taken from ghost states.
std::vector<CellState> transport_step(std::span<const CellState> cells,
                                      const CellState& left_ghost, const CellState& right_ghost,
                                      double dt, double dx);

} // namespace kinmerge::kinetic
