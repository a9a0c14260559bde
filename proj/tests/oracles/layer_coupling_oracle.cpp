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

#include "layer_coupling_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "lwr_closed_form.hpp"

namespace oracle {

namespace {

using namespace oracle::lwr;

// Incoming roads carry a right-boundary layer, the outgoing road a left one.
// A stable layer sits on the fixpoint branch away from rho*, so its flux is
// pinned by the half-Riemann table: sigma for RP1, F(rho_B) for RP2.
std::vector<double> stable_fluxes(double b, bool incoming) {
  const bool rp1 = incoming ? b >= kRhoStar : b <= kRhoStar;
  const bool rp2 = incoming ? b <= kRhoStar : b >= kRhoStar;
  std::vector<double> out;
  if (rp1) out.push_back(kSigma);
  if (rp2) out.push_back(flux(b));
  return out;
}

// Basin of the stable fixpoint, closed at both ends.
bool in_basin(double rho0, double c, bool incoming, double tol) {
  if (incoming) return rho0 <= rho_plus(c) + tol && rho0 >= -tol;
  return rho0 >= rho_minus(c) - tol && rho0 <= 1.0 + tol;
}

// An unstable layer is trivial, rho_K = rho0, on the branch of the side.
bool unstable_admissible(double rho0, double b, bool incoming, double tol) {
  if (incoming) {
    const double lo = b >= kRhoStar ? kRhoStar : tau(b);
    return rho0 >= lo - tol && rho0 <= 1.0 + tol;
  }
  const double hi = b <= kRhoStar ? kRhoStar : tau(b);
  return rho0 <= hi + tol && rho0 >= -tol;
}

} // namespace

std::vector<LayerCoupling> solve_layer_couplings(double b1, double b2, double b3, double tol) {
  const std::array<double, 3> b{b1, b2, b3};
  std::vector<LayerCoupling> out;
  for (int mask = 0; mask < 8; ++mask) {
    std::array<bool, 3> unstable{};
    for (int i = 0; i < 3; ++i) unstable[i] = (mask >> i) & 1;
    std::array<std::vector<double>, 3> options;
    for (int i = 0; i < 3; ++i)
      options[i] = unstable[i] ? std::vector<double>{0.0} : stable_fluxes(b[i], i < 2);
    for (double s1 : options[0])
      for (double s2 : options[1])
        for (double s3 : options[2]) {
          std::array<double, 3> s{s1, s2, s3};
          const int u_in = int(unstable[0]) + int(unstable[1]);
          const int u_out = int(unstable[2]);
          const double k = (unstable[2] ? 0.0 : s3) - (unstable[0] ? 0.0 : s1) -
                           (unstable[1] ? 0.0 : s2);
          double lo = 0.0, hi = 1.0, v = 0.0;
          if (u_in + u_out == 0) {
            if (std::abs(k) > tol) continue;
          } else if (u_in == u_out) {
            if (std::abs(k) > tol) continue;
            v = kSigma;
            lo = hi = kRhoStar;
          } else {
            v = k / (u_in - u_out);
            if (v < -tol || v > kSigma + tol) continue;
            v = std::clamp(v, 0.0, kSigma);
            const double up = rho_plus(v), down = rho_minus(v);
            if (u_in > 0 && u_out > 0 && std::abs(up - down) > 1e-6) continue;
            lo = hi = u_in > 0 ? up : down;
          }
          for (int i = 0; i < 3; ++i) {
            if (unstable[i]) continue;
            if (i < 2)
              hi = std::min(hi, rho_plus(s[i]));
            else
              lo = std::max(lo, rho_minus(s[i]));
          }
          if (lo > hi + tol) continue;
          bool ok = true;
          for (int i = 0; i < 3 && ok; ++i) {
            if (unstable[i])
              ok = unstable_admissible(lo, b[i], i < 2, tol) && unstable_admissible(hi, b[i], i < 2, tol);
            else
              ok = in_basin(lo, s[i], i < 2, tol) && in_basin(hi, s[i], i < 2, tol);
          }
          if (!ok) continue;
          LayerCoupling c;
          for (int i = 0; i < 3; ++i) c.flux[i] = unstable[i] ? v : s[i];
          if (c.flux[2] > kSigma + tol) continue;
          c.rho0_lo = lo;
          c.rho0_hi = hi;
          for (int i = 0; i < 3; ++i) c.signature += unstable[i] ? 'U' : 'S';
          out.push_back(c);
        }
  }
  return out;
}

} // namespace oracle
