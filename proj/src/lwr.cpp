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

#include "kinmerge/lwr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinmerge/error.hpp"

namespace kinmerge::lwr {

namespace {
constexpr double kRoundOff = 1e-13;
}

double scalar_godunov_flux(const FundamentalDiagram& d, double rho_l, double rho_r) {
  return std::min(demand(d, rho_l), supply(d, rho_r));
}

// F' is decreasing for concave F, so the extremes sit at the ends.
double max_characteristic_speed(const FundamentalDiagram& d) {
  return std::max(std::abs(d.derivative(0.0)), std::abs(d.derivative(1.0)));
}

std::vector<ScalarCell> scalar_step(const FundamentalDiagram& d, std::span<const ScalarCell> cells,
                                    double left_flux, double right_flux, double dt, double dx) {
  if (!(dx > 0.0) || !(dt >= 0.0)) fail(ErrorCode::InvalidArgument, "scalar_step: bad dt or dx");
  double speed = max_characteristic_speed(d);
  if (dt * speed > dx * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violated: dt * max|F'| = " << dt * speed << " exceeds dx = " << dx;
    fail(ErrorCode::StepSize, os.str());
  }
  const std::size_t n = cells.size();
  const double ratio = dt / dx;
  std::vector<ScalarCell> out(n);
  double west = left_flux;
  for (std::size_t i = 0; i < n; ++i) {
    double east = i + 1 < n ? scalar_godunov_flux(d, cells[i].rho, cells[i + 1].rho) : right_flux;
    double rho = cells[i].rho - ratio * (east - west);
    if (rho < -kRoundOff || rho > 1.0 + kRoundOff) {
      std::ostringstream os;
      os << "density " << rho << " left [0,1] in cell " << i;
      fail(ErrorCode::InvariantBreach, os.str());
    }
    out[i].rho = std::clamp(rho, 0.0, 1.0);
    west = east;
  }
  return out;
}

} // namespace kinmerge::lwr
