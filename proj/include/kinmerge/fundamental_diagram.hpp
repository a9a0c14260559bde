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

#include <functional>
#include <memory>

namespace kinmerge {

/// Density-flow relation F on [0,1] with its maximum sigma at rho_star.
///
/// A diagram is immutable once built. The validating constructor samples the
/// supplied functions and rejects anything that is not strictly concave, does
/// not vanish at both ends, leaves the triangle 0 <= F(rho) <= rho, or has a
/// slope above one.
class FundamentalDiagram {
public:
  using ScalarMap = std::function<double(double)>;

  static constexpr int kDefaultValidationSamples = 1001;

  FundamentalDiagram(ScalarMap flux, ScalarMap derivative, double rho_star, double sigma,
                     int validation_samples = kDefaultValidationSamples);

  /// Builds a diagram without any validation. Only meant for probing the
  /// sampling checks with deliberately broken inputs.
  static FundamentalDiagram unchecked(ScalarMap flux, ScalarMap derivative, double rho_star,
                                      double sigma);

  /// F(rho) = rho (1 - rho), rho_star = 1/2, sigma = 1/4.
  static FundamentalDiagram lwr();

  double flux(double rho) const { return flux_(rho); }
  double derivative(double rho) const { return derivative_(rho); }
  double rho_star() const noexcept { return rho_star_; }
  double sigma() const noexcept { return sigma_; }

private:
  FundamentalDiagram() = default;

  ScalarMap flux_;
  ScalarMap derivative_;
  double rho_star_ = 0.5;
  double sigma_ = 0.25;
};

/// The other density carrying the same flux; rho itself at rho_star.
double tau(const FundamentalDiagram& d, double rho);

/// Free-flow root of F(rho) = c on [0, rho_star]. Throws OutOfRange outside [0, sigma].
double rho_minus(const FundamentalDiagram& d, double c);

/// Congested root of F(rho) = c on [rho_star, 1]. Throws OutOfRange outside [0, sigma].
double rho_plus(const FundamentalDiagram& d, double c);

/// Equilibrium Riemann invariant F/(1 - rho + F). Returns 1 at rho = 1 (full jam).
double z_of_rho(const FundamentalDiagram& d, double rho);

/// Inverse of z_of_rho restricted to [lo, hi]; z_of_rho is nondecreasing
/// whenever the subcharacteristic condition holds.
double rho_of_z(const FundamentalDiagram& d, double z, double lo, double hi);

/// Demand of an incoming road: F up to rho_star, sigma beyond.
double demand(const FundamentalDiagram& d, double rho_b);

/// Supply of an outgoing road: sigma up to rho_star, F beyond.
double supply(const FundamentalDiagram& d, double rho_b);

/// Samples -F/(1-rho) <= F' <= 1 on a uniform grid of `samples` points.
/// At rho = 1 the ratio F/(1-rho) is replaced by its limit -F'(1).
bool check_subcharacteristic(const FundamentalDiagram& d, int samples);

/// Largest admissible truncation parameter of the priority merge, 1/(1 - F'(1)).
double delta_bar(const FundamentalDiagram& d);

/// Bisection for the root of a monotone function on [lo, hi]. Runs to machine
/// resolution and stops after 200 halvings at most.
double bisect(const std::function<double(double)>& g, double lo, double hi);

} // namespace kinmerge
