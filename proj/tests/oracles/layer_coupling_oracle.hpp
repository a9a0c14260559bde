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
#include <string>
#include <vector>

namespace oracle {

/// One way of coupling the three junction layers of an LWR fair merge.
struct LayerCoupling {
  std::array<double, 3> flux{};
  double rho0_lo = 0.0;
  double rho0_hi = 0.0;
  std::string signature;
};

/// Enumerates every stable/unstable layer assignment whose asymptotic states
/// are admissible for the half-Riemann problems at the boundary traces, with a
/// common junction density rho0 and C3 = C1 + C2. Works on F = rho (1 - rho).
std::vector<LayerCoupling> solve_layer_couplings(double rho_b_1, double rho_b_2, double rho_b_3,
                                                 double tol = 1e-12);

} // namespace oracle
