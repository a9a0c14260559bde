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

#include <span>
#include <vector>

#include "kinmerge/fundamental_diagram.hpp"

namespace kinmerge::lwr {

struct ScalarCell {
  double rho = 0.0;
};

/// min(demand(rho_l), supply(rho_r)): the exact Godunov flux for concave F.
double scalar_godunov_flux(const FundamentalDiagram& d, double rho_l, double rho_r);

/// max(|F'(0)|, |F'(1)|), the largest |F'| of a concave diagram.
double max_characteristic_speed(const FundamentalDiagram& d);

/// Conservative update with interior Godunov fluxes and injected boundary
/// fluxes. Throws StepSize when dt * max|F'| > dx.
std::vector<ScalarCell> scalar_step(const FundamentalDiagram& d, std::span<const ScalarCell> cells,
                                    double left_flux, double right_flux, double dt, double dx);

} // namespace kinmerge::lwr
