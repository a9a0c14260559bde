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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kinmerge/fundamental_diagram.hpp"

namespace kinmerge::layer {

/// Which end of a road the layer sits at. Outgoing roads see a Left layer at
/// the junction, incoming roads a Right layer.
enum class Side { Left, Right };

enum class Stability { Unstable, Stable };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double x, double tol = 0.0) const;
  static Interval point(double x) { return {x, x, true, true}; }
};

/// Stationary layer with constant flux q = C and density rho0 at y = 0.
struct LayerProblem {
  Side side = Side::Left;
  double flux = 0.0;
  double rho0 = 0.0;
};

struct LayerTrajectory {
  std::vector<double> y;
  std::vector<double> rho;
  /// Left the [0,1] band or settled on the inadmissible jam rho = 1 (C > 0).
  bool diverged = false;
  bool converged = false;
  /// Fixpoint reached when `converged`.
  double limit = 0.0;
};

/// Integrates d rho/dy = +-(1 - rho)(F(rho) - C)/C on [0, y_max] (plus sign on
/// the left side), sampling `steps` + 1 uniform points. C = 0 is resolved
/// analytically: the trajectory jumps to the stable state right after y = 0.
LayerTrajectory integrate_layer(const LayerProblem& problem, const FundamentalDiagram& d,
                                double y_max, int steps);

struct FixpointReport {
  double rho_minus = 0.0;
  double rho_plus = 0.0;
  double stable = 0.0;
  /// Absent at C = sigma, where both fixpoints merge into rho_star.
  std::optional<double> unstable;
  Interval attraction;
};

FixpointReport classify_fixpoints(const FundamentalDiagram& d, Side side, double flux);

enum class RiemannLabel { RP1, RP2 };

/// Admissible asymptotic layer states rho_K for a half-Riemann problem with
/// boundary trace rho_B, as a union of intervals (points are degenerate ones).
struct HalfRiemannClass {
  Side side = Side::Left;
  RiemannLabel label = RiemannLabel::RP1;
  std::vector<Interval> admissible_k;

  bool admits(double rho_k, double tol = 0.0) const;
};

HalfRiemannClass classify_half_riemann(const FundamentalDiagram& d, Side side, double rho_b);

enum class BoundaryCase { Ingoing1a, Ingoing1b, Transonic, Outgoing };

struct BoundaryValue {
  double flux = 0.0;
  double rho_k = 0.0;
  double rho_0 = 0.0;
  BoundaryCase label = BoundaryCase::Ingoing1a;
};

std::string_view to_string(BoundaryCase c);

/// Macroscopic boundary data at a left boundary where the kinetic model
/// prescribes Z, given the interior trace rho_B.
BoundaryValue left_boundary_condition(const FundamentalDiagram& d, double z_in, double rho_b);

/// Macroscopic boundary data at a right boundary where the kinetic model
/// prescribes w, given the interior trace rho_B.
BoundaryValue right_boundary_condition(const FundamentalDiagram& d, double w_in, double rho_b);

using Signature = std::array<Stability, 3>;

std::string signature_string(const Signature& s);

struct DensityBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Layer states of a 2-to-1 fair merge matched to the half-Riemann problems.
struct MatchResult {
  std::array<double, 3> flux{};
  std::array<double, 3> rho_k{};
  /// Junction densities; all three coincide. Only SSS leaves a proper interval.
  std::array<DensityBounds, 3> rho_0{};
  int rp_case = 1; // 1..8, RP pattern of roads 1-2-3
  int subcase = 1; // position within the case listing
  Signature signature{};
  bool ambiguous = false;

  std::string label() const;
};

/// Dispatches the boundary traces onto the eight Riemann-problem patterns and
/// their subcases, returning fluxes, asymptotic states and junction densities.
MatchResult match_fair_merge(const FundamentalDiagram& d, double rho_b_1, double rho_b_2,
                             double rho_b_3);

struct CouplingVerdict {
  bool admissible = false;
  std::array<double, 3> flux{};
  DensityBounds rho_0{};
  std::string relation;
};

/// Couples the three junction layers of the given stability pattern through
/// the fair-merge conditions rho_0^1 = rho_0^2 = rho_0^3, C3 = C1 + C2.
/// Fluxes that the pattern determines from the others are recomputed.
CouplingVerdict enumerate_layer_couplings(const FundamentalDiagram& d, const Signature& signature,
                                          const std::array<double, 3>& flux);

/// Writes `n`^3 grid points of match_fair_merge as comma-separated rows.
void write_match_table(std::ostream& os, const FundamentalDiagram& d, int n);

} // namespace kinmerge::layer
