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

#include "kinmerge/fundamental_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "kinmerge/error.hpp"

namespace kinmerge {

namespace {

constexpr double kCheckTol = 1e-12;
// Flux arguments a few ulps outside [0, sigma] come from sums like C1 + C2.
constexpr double kFluxSlack = 1e-14;
constexpr int kCoarseConcavitySamples = 101;
constexpr int kMaxBisections = 200;

std::string describe(const char* what, double at) {
  std::ostringstream os;
  os << "invalid fundamental diagram: " << what << " at rho = " << at;
  return os.str();
}

bool chord_below(const FundamentalDiagram& d, double a, double b) {
  double mid = 0.5 * (a + b);
  return d.flux(mid) > 0.5 * (d.flux(a) + d.flux(b));
}

void validate(const FundamentalDiagram& d, int samples) {
  if (samples < 3) fail(ErrorCode::InvalidArgument, "validation needs at least 3 samples");
  if (!(d.sigma() > 0.0 && d.sigma() <= 1.0))
    fail(ErrorCode::InvalidArgument, "invalid fundamental diagram: sigma must lie in (0,1]");
  if (!(d.rho_star() > 0.0 && d.rho_star() < 1.0))
    fail(ErrorCode::InvalidArgument, "invalid fundamental diagram: rho_star must lie in (0,1)");
  if (std::abs(d.flux(d.rho_star()) - d.sigma()) > kCheckTol)
    fail(ErrorCode::InvalidArgument, describe("F(rho_star) != sigma", d.rho_star()));
  if (std::abs(d.flux(0.0)) > kCheckTol) fail(ErrorCode::InvalidArgument, describe("F != 0", 0.0));
  if (std::abs(d.flux(1.0)) > kCheckTol) fail(ErrorCode::InvalidArgument, describe("F != 0", 1.0));

  const double h = 1.0 / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    double rho = i * h;
    double f = d.flux(rho);
    if (f < -kCheckTol || f > rho + kCheckTol)
      fail(ErrorCode::InvalidArgument, describe("graph leaves 0 <= F <= rho", rho));
    if (f > d.sigma() + kCheckTol)
      fail(ErrorCode::InvalidArgument, describe("F exceeds sigma", rho));
    if (d.derivative(rho) > 1.0 + kCheckTol)
      fail(ErrorCode::InvalidArgument, describe("F' > 1", rho));
    if (i + 2 < samples && !chord_below(d, rho, rho + 2 * h))
      fail(ErrorCode::InvalidArgument, describe("not strictly concave", rho + h));
  }
  const double H = 1.0 / (kCoarseConcavitySamples - 1);
  for (int i = 0; i < kCoarseConcavitySamples; ++i) {
    for (int j = i + 2; j < kCoarseConcavitySamples; j += 2) {
      if (!chord_below(d, i * H, j * H))
        fail(ErrorCode::InvalidArgument, describe("not strictly concave", 0.5 * (i + j) * H));
    }
  }
}

double checked_flux_level(const FundamentalDiagram& d, double c, const char* who) {
  if (!(c >= -kFluxSlack && c <= d.sigma() + kFluxSlack)) {
    std::ostringstream os;
    os << who << ": flux " << c << " outside [0, sigma=" << d.sigma() << "]";
    fail(ErrorCode::OutOfRange, os.str());
  }
  return std::clamp(c, 0.0, d.sigma());
}

} // namespace

FundamentalDiagram::FundamentalDiagram(ScalarMap flux, ScalarMap derivative, double rho_star,
                                       double sigma, int validation_samples)
    : flux_(std::move(flux)), derivative_(std::move(derivative)), rho_star_(rho_star),
      sigma_(sigma) {
  if (!flux_ || !derivative_) fail(ErrorCode::InvalidArgument, "fundamental diagram needs F and F'");
  validate(*this, validation_samples);
}

FundamentalDiagram FundamentalDiagram::unchecked(ScalarMap flux, ScalarMap derivative,
                                                 double rho_star, double sigma) {
  FundamentalDiagram d;
  d.flux_ = std::move(flux);
  d.derivative_ = std::move(derivative);
  d.rho_star_ = rho_star;
  d.sigma_ = sigma;
  return d;
}

FundamentalDiagram FundamentalDiagram::lwr() {
  return FundamentalDiagram([](double r) { return r * (1.0 - r); },
                            [](double r) { return 1.0 - 2.0 * r; }, 0.5, 0.25);
}

double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  if (glo == 0.0) return lo;
  double ghi = g(hi);
  if (ghi == 0.0) return hi;
  const bool lo_negative = glo < 0.0;
  for (int it = 0; it < kMaxBisections; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double rho_minus(const FundamentalDiagram& d, double c) {
  c = checked_flux_level(d, c, "rho_minus");
  if (c == 0.0) return 0.0;
  if (c == d.sigma()) return d.rho_star();
  return bisect([&](double r) { return d.flux(r) - c; }, 0.0, d.rho_star());
}

double rho_plus(const FundamentalDiagram& d, double c) {
  c = checked_flux_level(d, c, "rho_plus");
  if (c == 0.0) return 1.0;
  if (c == d.sigma()) return d.rho_star();
  return bisect([&](double r) { return d.flux(r) - c; }, d.rho_star(), 1.0);
}

double tau(const FundamentalDiagram& d, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::OutOfRange, "tau: density outside [0,1]");
  if (rho == d.rho_star()) return rho;
  double c = std::clamp(d.flux(rho), 0.0, d.sigma());
  return rho < d.rho_star() ? rho_plus(d, c) : rho_minus(d, c);
}

double z_of_rho(const FundamentalDiagram& d, double rho) {
  if (rho >= 1.0) return 1.0;
  double f = d.flux(rho);
  return f / (1.0 - rho + f);
}

double rho_of_z(const FundamentalDiagram& d, double z, double lo, double hi) {
  return bisect([&](double r) { return z_of_rho(d, r) - z; }, lo, hi);
}

double demand(const FundamentalDiagram& d, double rho_b) {
  return rho_b <= d.rho_star() ? d.flux(rho_b) : d.sigma();
}

double supply(const FundamentalDiagram& d, double rho_b) {
  return rho_b <= d.rho_star() ? d.sigma() : d.flux(rho_b);
}

bool check_subcharacteristic(const FundamentalDiagram& d, int samples) {
  if (samples < 2) fail(ErrorCode::InvalidArgument, "check_subcharacteristic needs >= 2 samples");
  const double h = 1.0 / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    double rho = i == samples - 1 ? 1.0 : i * h;
    double slope = d.derivative(rho);
    double lower = rho < 1.0 ? -d.flux(rho) / (1.0 - rho) : d.derivative(1.0);
    if (slope < lower - kCheckTol || slope > 1.0 + kCheckTol) return false;
  }
  return true;
}

double delta_bar(const FundamentalDiagram& d) { return 1.0 / (1.0 - d.derivative(1.0)); }

} // namespace kinmerge
