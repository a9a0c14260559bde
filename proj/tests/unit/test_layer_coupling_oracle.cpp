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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles/layer_coupling_oracle.hpp"
#include "support/generators.hpp"
#include "kinmerge/junction.hpp"
#include "kinmerge/layer.hpp"

using namespace kinmerge;

namespace {

const FundamentalDiagram lwr_diagram = FundamentalDiagram::lwr();

// Checks match_fair_merge against every coupling the enumeration oracle finds.
void check_point(double b1, double b2, double b3) {
  const auto m = layer::match_fair_merge(lwr_diagram, b1, b2, b3);
  const auto macro = junction::macro_fair_merge(lwr_diagram, b1, b2, b3);
  const auto solutions = oracle::solve_layer_couplings(b1, b2, b3);
  INFO("traces " << b1 << ", " << b2 << ", " << b3 << " -> " << m.label());
  REQUIRE_FALSE(solutions.empty());
  bool found = false;
  for (const auto& s : solutions) {
    for (int i = 0; i < 3; ++i) REQUIRE(std::abs(s.flux[i] - solutions.front().flux[i]) <= 1e-12);
    bool same = true;
    for (int i = 0; i < 3; ++i) same = same && std::abs(s.flux[i] - m.flux[i]) <= 1e-12;
    if (same && m.rho_0[0].lo >= s.rho0_lo - 1e-9 && m.rho_0[0].hi <= s.rho0_hi + 1e-9) found = true;
  }
  REQUIRE(found);
  for (int i = 0; i < 3; ++i) REQUIRE(std::abs(m.flux[i] - macro.fluxes[i]) <= 1e-12);
}

} // namespace

TEST_CASE("uniform grid agrees with the enumeration oracle") {
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      for (int k = 0; k <= 20; ++k) check_point(i / 20.0, j / 20.0, k / 20.0);
}

TEST_CASE("property: random traces agree with the enumeration oracle") {
  gen::Source g(2718);
  for (int n = 0; n < 5000; ++n)
    check_point(g.unit_with_edges(0.2), g.unit_with_edges(0.2), g.unit_with_edges(0.2));
}
